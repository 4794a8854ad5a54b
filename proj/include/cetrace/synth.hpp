#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cetrace/clustering.hpp"
#include "cetrace/conflicts.hpp"
#include "cetrace/log_model.hpp"

namespace cetrace {

/// SplitMix64 (Steele, Lea, Flood 2014). Portable and fully specified, so
/// fixtures reproduce across implementations:
///   state += 0x9e3779b97f4a7c15
///   z = (state ^ (state >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
/// Bounded draws use the high 64 bits of a 128-bit product (no rejection).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// True with probability num / den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

 private:
  std::uint64_t state_;
};

enum class Layout {
  // Each author writes in its own position band, bands kept apart by more
  // than any plant's position bound, so no background case is ever a
  // potential conflict. Required for plants.
  Banded,
  // All authors random-walk over one shared region; dense in cases.
  Mixed,
};

struct PlannedSession {
  std::vector<std::uint32_t> authors;  // indices < SynthConfig::authors
  std::size_t ops = 20;
  Duration max_step = std::chrono::seconds{10};  // must stay below the gap
};

enum class PlantKind { Border, Insertion };

std::string_view to_string(PlantKind kind);

/// Plants one realized conflict pattern into a session.
struct PlantDirective {
  PlantKind kind = PlantKind::Border;
  std::size_t session = 0;
  Window window{std::chrono::seconds{30}, 10};
  std::optional<Duration> step;        // time between pattern edits
  std::optional<std::int64_t> offset;  // position spread of the pattern
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::string doc_id = "synth";
  std::size_t authors = 2;
  Duration gap = std::chrono::seconds{30};
  Duration session_pause = std::chrono::seconds{120};  // >= gap
  Layout layout = Layout::Banded;
  std::int64_t band_width = 200;
  std::size_t max_author_run = 0;  // 0: unbounded
  bool with_content = false;
  std::int64_t start_ms = 1'500'000'000'000;
  std::vector<PlannedSession> sessions;
  std::vector<PlantDirective> plants;
};

struct PlantTruth {
  PlantKind kind = PlantKind::Border;
  std::size_t session = 0;
  std::size_t first_op = 0;  // log index of X (border) or X1 (insertion)
  Window window;
  Outcome expected = Outcome::Conflict;
};

struct GroundTruth {
  Duration gap{};
  std::vector<std::size_t> session_starts;  // log index of each session's first edit
  std::vector<PlantTruth> plants;
};

struct SynthResult {
  EditLog log;
  GroundTruth truth;
};

/// Deterministic in (config, seed). Throws DataError for infeasible plans.
SynthResult generate(const SynthConfig& config);

/// Companion file for a generated log.
void write_truth(const GroundTruth& truth, const std::string& doc_id, std::ostream& out);
GroundTruth read_truth(std::istream& in);

/// A banded document of `sessions` co-author sessions (2 or 3 authors each)
/// with `plants` realized conflicts, alternating border and insertion and
/// spread round-robin over the sessions. Generation gap 30s.
SynthConfig fixture_config(std::uint64_t seed, std::size_t sessions, std::size_t plants,
                           const Window& window = {std::chrono::seconds{30}, 10});

/// A random Mixed-layout document of at most `max_ops` edits, used by the
/// property and oracle-equivalence runs. Author runs are capped at 8 so the
/// exhaustive insertion oracle stays bounded.
SynthConfig random_property_config(std::uint64_t seed, std::size_t max_ops = 200);

}  // namespace cetrace
