#include "chordgraph/pitch.hpp"

#include <array>
#include <stdexcept>

namespace chordgraph {

namespace {

constexpr std::array<int, kStepCount> kSemitones = {0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, kStepCount> kFifths = {0, 2, 4, -1, 1, 3, 5};
constexpr std::array<char, kStepCount> kLetters = {'C', 'D', 'E', 'F', 'G', 'A', 'B'};

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

int step_semitones(Step step) { return kSemitones[static_cast<int>(step)]; }
int step_fifths(Step step) { return kFifths[static_cast<int>(step)]; }
char step_letter(Step step) { return kLetters[static_cast<int>(step)]; }

std::optional<Step> step_from_letter(char letter) {
  for (int i = 0; i < kStepCount; ++i) {
    if (kLetters[i] == letter) return static_cast<Step>(i);
  }
  return std::nullopt;
}

int SpelledPitchClass::semitone_class() const {
  return ((step_semitones(step) + alter) % 12 + 12) % 12;
}

std::string SpelledPitchClass::name() const {
  std::string s(1, step_letter(step));
  if (alter > 0) s.append(static_cast<std::size_t>(alter), '#');
  if (alter < 0) s.append(static_cast<std::size_t>(-alter), 'b');
  return s;
}

SpelledPitchClass SpelledPitchClass::from_fifths(int fifths) {
  // F..B occupy -1..5 on the line of fifths.
  const int alter = floor_div(fifths + 1, 7);
  const int natural = fifths - 7 * alter;
  for (int i = 0; i < kStepCount; ++i) {
    if (kFifths[i] == natural) return {static_cast<Step>(i), alter};
  }
  throw std::logic_error("unreachable line-of-fifths position");
}

std::optional<SpelledPitchClass> SpelledPitchClass::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const auto step = step_from_letter(text.front());
  if (!step) return std::nullopt;
  const std::string_view rest = text.substr(1);
  int alter = 0;
  for (char c : rest) {
    if (c == '#' && alter >= 0) {
      ++alter;
    } else if (c == 'b' && alter <= 0) {
      --alter;
    } else {
      return std::nullopt;
    }
  }
  if (alter < kMinAlter || alter > kMaxAlter) return std::nullopt;
  return SpelledPitchClass{*step, alter};
}

int SpelledPitch::midi() const { return 12 * (octave + 1) + step_semitones(step) + alter; }

void SpelledPitch::validate() const {
  if (alter < kMinAlter || alter > kMaxAlter) {
    throw std::invalid_argument("alteration " + std::to_string(alter) + " outside [-2, 2]");
  }
  if (octave < kMinOctave || octave > kMaxOctave) {
    throw std::invalid_argument("octave " + std::to_string(octave) + " outside [0, 10]");
  }
}

}  // namespace chordgraph
