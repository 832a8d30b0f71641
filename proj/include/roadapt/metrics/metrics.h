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

// Word-level alignment metrics (WER, MER, WIL, WIP) and speaker-similarity
// statistics over embedding vectors.

#ifndef ROADAPT_METRICS_METRICS_H_
#define ROADAPT_METRICS_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roadapt::metrics {

struct AlignmentCounts {
  std::size_t hits = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t n_ref = 0;
  std::size_t n_hyp = 0;

  // H + S + D = N_ref and H + S + I = N_hyp.
  bool Consistent() const {
    return hits + substitutions + deletions == n_ref && hits + substitutions + insertions == n_hyp;
  }
  AlignmentCounts& operator+=(const AlignmentCounts& o);
  friend bool operator==(const AlignmentCounts&, const AlignmentCounts&) = default;
};

// Minimum edit distance with unit substitution, deletion and insertion
// costs. Among minimum-cost alignments the backtrace (from the end) prefers
// hit, then substitution, then deletion, then insertion.
AlignmentCounts Align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// Whitespace tokenization. With `normalize`, text is lower-cased (ASCII and
// Romanian letters) and punctuation is stripped first.
std::vector<std::string> Tokenize(std::string_view text, bool normalize = false);

struct MetricReport {
  double wer = 0;
  double mer = 0;
  double wil = 0;
  double wip = 0;

  // Throws ValidationError when n_ref == 0.
  static MetricReport FromCounts(const AlignmentCounts& counts);
};

// Whether a reported (wil, wip) pair in percent satisfies wil = 100 - wip
// up to the rounding of two two-decimal figures.
bool WilWipConsistent(double wil_percent, double wip_percent, double tolerance = 0.01);

// dot(a, b) / (|a| |b|). Throws ValidationError on a zero vector or a
// dimension mismatch.
double Cosine(std::span<const double> a, std::span<const double> b);

struct SimilarityStats {
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation; 0 for one value
  double min = 0;
  double max = 0;
  double median = 0;
  std::size_t count = 0;
};

// Throws ValidationError on an empty list.
SimilarityStats Summarize(std::span<const double> values);

}  // namespace roadapt::metrics

#endif  // ROADAPT_METRICS_METRICS_H_
