#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "seqlab/conll.hpp"

namespace seqlab {

struct SpanCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct EvalReport {
  double token_accuracy = 0;
  double precision = 0, recall = 0, f1 = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::map<std::string, SpanCounts> per_label;
  std::size_t token_count = 0, correct_tokens = 0;
  double wall_seconds = 0;
};

inline double evaluate_accuracy(const std::vector<std::string>& pred,
                                const std::vector<std::string>& gold) {
  require(pred.size() == gold.size(), "accuracy: ", pred.size(),
          " predictions vs ", gold.size(), " gold tags");
  if (pred.empty()) return 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == gold[i]) ++hits;
  return double(hits) / double(pred.size());
}

// (type, start, end) with inclusive ends, read off BIO2 tags. Input is
// repaired through to_bio2 first, so stray I-X openers become spans too
// (conlleval behaviour).
inline std::vector<std::tuple<std::string, std::size_t, std::size_t>>
extract_spans(const std::vector<std::string>& tags) {
  std::vector<std::string> bio = to_bio2(tags);
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> spans;
  std::string open_type;
  std::size_t open_start = 0;
  auto close = [&](std::size_t end) {
    if (!open_type.empty()) spans.emplace_back(open_type, open_start, end);
    open_type.clear();
  };
  for (std::size_t i = 0; i < bio.size(); ++i) {
    const std::string& t = bio[i];
    if (t == "O") {
      close(i - 1);
    } else if (t[0] == 'B') {
      close(i - 1);
      open_type = t.substr(2);
      open_start = i;
    }
    // I- continues the open span (to_bio2 guarantees type agreement)
  }
  close(bio.empty() ? 0 : bio.size() - 1);
  return spans;
}

// Exact-match span micro P/R/F1 over a corpus; per-label counts included.
inline EvalReport evaluate_span_f1(
    const std::vector<std::vector<std::string>>& pred,
    const std::vector<std::vector<std::string>>& gold) {
  require(pred.size() == gold.size(), "span f1: ", pred.size(),
          " predicted sentences vs ", gold.size(), " gold");
  EvalReport report;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    require(pred[s].size() == gold[s].size(), "span f1: sentence ", s,
            " length mismatch");
    report.token_count += pred[s].size();
    for (std::size_t i = 0; i < pred[s].size(); ++i)
      if (pred[s][i] == gold[s][i]) ++report.correct_tokens;

    auto p_spans = extract_spans(pred[s]);
    auto g_spans = extract_spans(gold[s]);
    for (const auto& span : p_spans) {
      const std::string& type = std::get<0>(span);
      bool hit = std::find(g_spans.begin(), g_spans.end(), span) != g_spans.end();
      if (hit) {
        ++report.tp;
        ++report.per_label[type].tp;
      } else {
        ++report.fp;
        ++report.per_label[type].fp;
      }
    }
    for (const auto& span : g_spans) {
      if (std::find(p_spans.begin(), p_spans.end(), span) == p_spans.end()) {
        ++report.fn;
        ++report.per_label[std::get<0>(span)].fn;
      }
    }
  }
  report.token_accuracy = report.token_count == 0
                              ? 0.0
                              : double(report.correct_tokens) / double(report.token_count);
  report.precision =
      report.tp + report.fp == 0 ? 0.0 : double(report.tp) / double(report.tp + report.fp);
  report.recall =
      report.tp + report.fn == 0 ? 0.0 : double(report.tp) / double(report.tp + report.fn);
  report.f1 = report.precision + report.recall == 0
                  ? 0.0
                  : 2 * report.precision * report.recall /
                        (report.precision + report.recall);
  return report;
}

inline EvalReport evaluate_span_f1(const std::vector<std::string>& pred,
                                   const std::vector<std::string>& gold) {
  return evaluate_span_f1(std::vector<std::vector<std::string>>{pred},
                          std::vector<std::vector<std::string>>{gold});
}

}  // namespace seqlab
