// Copyright 2026 The C3 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference Jaro-Winkler written straight from the textbook definition:
//   matching window  floor(max(|s1|,|s2|) / 2) - 1
//   jaro             (m/|s1| + m/|s2| + (m - t)/m) / 3, t = half the
//                    out-of-order matched characters
//   winkler          jaro + l * 0.1 * (1 - jaro), l = common prefix <= 4

#pragma once

#include <string>

namespace c3::testing_support {

inline double reference_jaro_winkler_distance(const std::string& s1, const std::string& s2) {
  if (s1 == s2) return 0.0;
  int n1 = static_cast<int>(s1.size());
  int n2 = static_cast<int>(s2.size());
  if (n1 == 0 || n2 == 0) return 1.0;
  int longer = n1 > n2 ? n1 : n2;
  int window = longer / 2 - 1;
  if (window < 0) window = 0;

  std::string flags1(n1, '0');
  std::string flags2(n2, '0');
  int m = 0;
  for (int i = 0; i < n1; ++i) {
    int from = i - window < 0 ? 0 : i - window;
    int to = i + window < n2 - 1 ? i + window : n2 - 1;
    for (int j = from; j <= to; ++j) {
      if (flags2[j] == '1' || s1[i] != s2[j]) continue;
      flags1[i] = '1';
      flags2[j] = '1';
      m += 1;
      break;
    }
  }
  if (m == 0) return 1.0;

  std::string seq1;
  std::string seq2;
  for (int i = 0; i < n1; ++i)
    if (flags1[i] == '1') seq1 += s1[i];
  for (int j = 0; j < n2; ++j)
    if (flags2[j] == '1') seq2 += s2[j];
  int out_of_order = 0;
  for (int k = 0; k < m; ++k)
    if (seq1[k] != seq2[k]) out_of_order += 1;

  double dm = m;
  double t = out_of_order / 2.0;
  double jaro = (dm / n1 + dm / n2 + (dm - t) / dm) / 3.0;
  int l = 0;
  while (l < 4 && l < n1 && l < n2 && s1[l] == s2[l]) l += 1;
  double sim = jaro + l * 0.1 * (1.0 - jaro);
  double d = 1.0 - sim;
  return d < 0.0 ? 0.0 : (d > 1.0 ? 1.0 : d);
}

}  // namespace c3::testing_support
