#pragma once

// Labels shared by the tests and the acceptance run.

#include <vector>

#include "qso/gtbasis.hpp"

namespace suite {

inline qso::HalfInt H(int twice) { return qso::HalfInt::from_twice(twice); }

inline std::vector<qso::IrrepLabel> classical_labels() {
  using qso::IrrepLabel;
  return {
      IrrepLabel::classical(3, {H(1)}),       IrrepLabel::classical(3, {H(2)}),
      IrrepLabel::classical(3, {H(4)}),       IrrepLabel::classical(4, {H(2), H(0)}),
      IrrepLabel::classical(4, {H(2), H(2)}), IrrepLabel::classical(4, {H(4), H(2)}),
      IrrepLabel::classical(5, {H(2), H(0)}), IrrepLabel::classical(5, {H(2), H(2)}),
      IrrepLabel::classical(5, {H(4), H(2)}), IrrepLabel::classical(6, {H(2), H(0), H(0)}),
      IrrepLabel::classical(6, {H(2), H(2), H(0)}),
  };
}

inline std::vector<int> all_plus(int n) { return std::vector<int>(n - 1, 1); }
inline std::vector<int> alternating(int n) {
  std::vector<int> e(n - 1);
  for (int i = 0; i < n - 1; ++i) e[i] = i % 2 == 0 ? 1 : -1;
  return e;
}

inline std::vector<qso::IrrepLabel> nonclassical_labels() {
  using qso::IrrepLabel;
  std::vector<IrrepLabel> out;
  const std::vector<std::pair<int, qso::Row>> weights = {
      {3, {H(1)}}, {3, {H(3)}}, {3, {H(5)}}, {4, {H(1), H(1)}}, {4, {H(3), H(1)}}, {5, {H(3), H(1)}}};
  for (const auto& [n, w] : weights)
    for (const auto& e : {all_plus(n), alternating(n)}) out.push_back(IrrepLabel::nonclassical(n, w, e));
  return out;
}

inline std::vector<qso::IrrepLabel> all_labels() {
  auto out = classical_labels();
  for (auto& l : nonclassical_labels()) out.push_back(l);
  return out;
}

inline const std::vector<double> q_values{0.7, 1.3};

}  // namespace suite
