#pragma once

#include <string>
#include <vector>

#include "chordgraph/model.hpp"
#include "chordgraph/synth.hpp"

namespace cgtest {

inline chordgraph::ModelConfig tiny_config(std::size_t hidden = 4) {
  chordgraph::ModelConfig c;
  c.hidden_size = hidden;
  c.dropout = 0.0;
  c.post_hidden = 3;
  c.post_dropout = 0.0;
  c.epochs = 3;
  c.post_epochs = 3;
  c.patience = 0;
  return c;
}

inline std::vector<chordgraph::Example> synth_examples(std::size_t n, std::uint64_t seed) {
  chordgraph::SynthOptions opts;
  opts.pieces = n;
  opts.seed = seed;
  std::vector<chordgraph::Example> out;
  for (const auto &p : chordgraph::synthesize_corpus(opts)) {
    out.push_back(chordgraph::make_example(p.name, p.score, p.timeline));
  }
  return out;
}

}  // namespace cgtest
