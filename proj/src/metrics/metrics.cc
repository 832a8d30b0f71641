// Copyright 2026 The roadapt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roadapt/metrics/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "roadapt/error.h"
#include "roadapt/text/codec.h"

namespace roadapt::metrics {

AlignmentCounts& AlignmentCounts::operator+=(const AlignmentCounts& o) {
  hits += o.hits;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  n_ref += o.n_ref;
  n_hyp += o.n_hyp;
  return *this;
}

AlignmentCounts Align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentCounts c;
  c.n_ref = n;
  c.n_hyp = m;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      ++c.hits;
      --i;
      --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

std::vector<std::string> Tokenize(std::string_view text, bool normalize) {
  std::u32string chars = text::DecodeUtf8(text);
  if (normalize) {
    std::u32string cleaned;
    for (char32_t c : chars) {
      if (c < 0x80 && std::ispunct(static_cast<int>(c))) continue;
      if (c == U'„' || c == U'”' || c == U'“' || c == U'«' || c == U'»' || c == U'…') continue;
      if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
      switch (c) {
        case U'Ă': c = U'ă'; break;
        case U'Â': c = U'â'; break;
        case U'Î': c = U'î'; break;
        case U'Ș': c = U'ș'; break;
        case U'Ț': c = U'ț'; break;
        case U'Ş': c = U'ş'; break;
        case U'Ţ': c = U'ţ'; break;
        default: break;
      }
      cleaned.push_back(c);
    }
    chars = std::move(cleaned);
  }
  std::vector<std::string> words;
  std::u32string current;
  for (char32_t c : chars) {
    const bool space = c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
                       c == U'\v' || c == 0xA0;
    if (space) {
      if (!current.empty()) words.push_back(text::EncodeUtf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(text::EncodeUtf8(current));
  return words;
}

MetricReport MetricReport::FromCounts(const AlignmentCounts& c) {
  if (c.n_ref == 0) throw ValidationError("metrics need at least one reference word");
  if (!c.Consistent()) throw ValidationError("inconsistent alignment counts");
  const double errors = static_cast<double>(c.substitutions + c.deletions + c.insertions);
  const double h = static_cast<double>(c.hits);
  MetricReport r;
  r.wer = errors / static_cast<double>(c.n_ref);
  const double denom = static_cast<double>(c.hits + c.substitutions + c.deletions + c.insertions);
  r.mer = errors / denom;
  r.wip = c.n_hyp == 0 ? 0.0 : (h / static_cast<double>(c.n_ref)) * (h / static_cast<double>(c.n_hyp));
  r.wil = 1.0 - r.wip;
  if (std::abs(r.wil + r.wip - 1.0) > 1e-12) throw Error("wil + wip != 1");
  return r;
}

bool WilWipConsistent(double wil_percent, double wip_percent, double tolerance) {
  return std::abs(wil_percent + wip_percent - 100.0) <= tolerance + 1e-9;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw ValidationError("cosine: zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

SimilarityStats Summarize(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot summarize an empty list");
  SimilarityStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  return s;
}

}  // namespace roadapt::metrics
