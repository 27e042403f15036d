#pragma once

#include <cstddef>
#include <vector>

#include "chordgraph/rng.hpp"
#include "chordgraph/score.hpp"

namespace cgtest {

// Onsets and durations on mixed binary/ternary grids, so exact rational
// comparison matters; simultaneous onsets are frequent.
inline chordgraph::RationalTime random_time(chordgraph::Rng &rng, long max_units) {
  static const long dens[] = {1, 2, 3, 4, 6, 8};
  const long den = dens[rng.below(6)];
  return chordgraph::RationalTime(static_cast<long>(rng.below(static_cast<std::uint64_t>(max_units * den))), den);
}

inline chordgraph::Score random_score(chordgraph::Rng &rng, std::size_t n_notes) {
  using namespace chordgraph;
  std::vector<Note> notes;
  std::vector<RationalTime> pool;
  for (std::size_t i = 0; i < n_notes; ++i) {
    RationalTime onset = (!pool.empty() && rng.bernoulli(0.4)) ? pool[rng.below(pool.size())] : random_time(rng, 4);
    pool.push_back(onset);
    RationalTime dur = random_time(rng, 2);
    if (dur == RationalTime(0)) dur = RationalTime(1, 4);
    // Sometimes end exactly where another note starts.
    if (rng.bernoulli(0.3) && !pool.empty()) {
      const RationalTime target = pool[rng.below(pool.size())];
      if (onset < target) dur = target - onset;
    }
    const Step step = static_cast<Step>(rng.below(7));
    const int alter = static_cast<int>(rng.below(3)) - 1;
    const int octave = 2 + static_cast<int>(rng.below(4));
    notes.push_back(Note{0, onset, dur, SpelledPitch{step, alter, octave}});
  }
  return Score(std::move(notes), {TimeSignature{RationalTime(0), rng.bernoulli(0.5) ? 4 : 3, 4}});
}

}  // namespace cgtest
