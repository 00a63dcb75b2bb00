// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/report.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

#include "agp/error.hpp"

namespace agp {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string corner(const GeneralizationMatrix& m) {
  return m.axis == MatrixAxis::Temporal ? "train_t\\test_t" : "train\\test";
}

}  // namespace

int HeatmapScale::bin(double accuracy) noexcept {
  int b = 0;
  for (double e : kEdges) {
    if (accuracy >= e) ++b;
  }
  return b;
}

std::string matrix_csv(const GeneralizationMatrix& m) {
  std::string out = corner(m);
  for (const auto& c : m.col_labels) out += "," + c;
  out += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.row_labels[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out += "," + num(m.at(r, c));
    out += "\n";
  }
  return out;
}

std::string matrix_counts_csv(const GeneralizationMatrix& m) {
  std::string out = corner(m);
  for (const auto& c : m.col_labels) out += "," + c;
  out += "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.row_labels[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out += "," + std::to_string(m.count_at(r, c));
    out += "\n";
  }
  return out;
}

std::string matrix_svg(const GeneralizationMatrix& m, const HeatmapOptions& opts) {
  constexpr int kCell = 40, kLeft = 60, kTop = 50, kLegend = 30;
  const int width = kLeft + static_cast<int>(m.cols()) * kCell + 20;
  const int height = kTop + static_cast<int>(m.rows()) * kCell + kLegend + 40;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!opts.title.empty()) {
    out += "<text x=\"" + std::to_string(kLeft) + "\" y=\"16\" font-size=\"13\">" +
           xml_escape(opts.title) + "</text>\n";
  }
  out += "<text x=\"" + std::to_string(kLeft) + "\" y=\"32\">columns: test, rows: train</text>\n";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    out += "<text class=\"col-label\" x=\"" + std::to_string(kLeft + static_cast<int>(c) * kCell + kCell / 2) +
           "\" y=\"" + std::to_string(kTop - 4) + "\" text-anchor=\"middle\">" +
           xml_escape(m.col_labels[c]) + "</text>\n";
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const int y = kTop + static_cast<int>(r) * kCell;
    out += "<text class=\"row-label\" x=\"" + std::to_string(kLeft - 6) + "\" y=\"" +
           std::to_string(y + kCell / 2 + 4) + "\" text-anchor=\"end\">" +
           xml_escape(m.row_labels[r]) + "</text>\n";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const int x = kLeft + static_cast<int>(c) * kCell;
      const double a = m.at(r, c);
      out += "<rect class=\"cell\" data-row=\"" + std::to_string(r) + "\" data-col=\"" +
             std::to_string(c) + "\" data-bin=\"" + std::to_string(HeatmapScale::bin(a)) +
             "\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\" fill=\"" +
             std::string(HeatmapScale::color(a)) + "\"/>\n";
      if (opts.annotate) {
        out += "<text x=\"" + std::to_string(x + kCell / 2) + "\" y=\"" +
               std::to_string(y + kCell / 2 + 4) + "\" text-anchor=\"middle\">" + fixed(a, 2) +
               "</text>\n";
      }
    }
  }
  const int ly = kTop + static_cast<int>(m.rows()) * kCell + 16;
  static constexpr std::string_view kBinLabels[] = {"<0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", ">=0.8"};
  for (int b = 0; b < 5; ++b) {
    const int x = kLeft + b * 50;
    out += "<rect class=\"legend\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(ly) +
           "\" width=\"14\" height=\"14\" fill=\"" + std::string(HeatmapScale::kColors[b]) + "\"/>\n";
    out += "<text x=\"" + std::to_string(x + 17) + "\" y=\"" + std::to_string(ly + 11) + "\">" +
           xml_escape(kBinLabels[b]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_matrix(const GeneralizationMatrix& m, const std::string& prefix,
                  const HeatmapOptions& opts) {
  write_text(prefix + ".csv", matrix_csv(m));
  write_text(prefix + "_counts.csv", matrix_counts_csv(m));
  write_text(prefix + ".svg", matrix_svg(m, opts));
}

std::string curves_csv(const std::vector<AccuracyCurve>& curves, std::string_view set_label) {
  std::string out = "set,component,timestep,accuracy,count\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.timesteps.size(); ++i) {
      out += std::string(set_label) + "," + c.component.name() + "," +
             std::to_string(c.timesteps[i]) + "," + num(c.accuracy[i]) + "," +
             std::to_string(c.counts[i]) + "\n";
    }
  }
  return out;
}

std::string intervention_rows_csv(const InterventionReport& r) {
  std::string out = "sentence_id,number";
  for (const auto& t : r.config.targets) out += ",pre_" + t.name() + ",post_" + t.name();
  out +=
      ",plain_correct,intervened_correct,plain_logp_correct,plain_logp_incorrect,"
      "intervened_logp_correct,intervened_logp_incorrect,mean_abs_dlogp,max_abs_dlogp,"
      "compared_tokens\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.sentence_id) + "," + std::string(to_string(row.number));
    for (std::size_t i = 0; i < row.pre_prob.size(); ++i) {
      out += "," + num(row.pre_prob[i]) + "," + num(row.post_prob[i]);
    }
    const double mean = row.compared_tokens ? row.sum_abs_dlogp / static_cast<double>(row.compared_tokens) : 0.0;
    out += "," + std::to_string(row.plain_correct ? 1 : 0) + "," +
           std::to_string(row.intervened_correct ? 1 : 0) + "," + num(row.plain_logp_correct) +
           "," + num(row.plain_logp_incorrect) + "," + num(row.intervened_logp_correct) + "," +
           num(row.intervened_logp_incorrect) + "," + num(mean) + "," + num(row.max_abs_dlogp) +
           "," + std::to_string(row.compared_tokens) + "\n";
  }
  return out;
}

std::string intervention_words_csv(const InterventionReport& r, const Vocab& vocab) {
  std::string out = "sentence_id,position,token,logp_plain,logp_intervened\n";
  for (const auto& w : r.words) {
    out += std::to_string(w.sentence_id) + "," + std::to_string(w.position) + "," +
           vocab.word(w.token) + "," + fixed(w.plain, 4) + "," + fixed(w.intervened, 4) + "\n";
  }
  return out;
}

std::string intervention_summary_json(const InterventionReport& r, std::uint64_t seed) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["eta"] = r.config.eta;
  cfg["apply_at"] = r.config.apply_at;
  cfg["error"] = std::string(to_string(r.config.error));
  cfg["steps"] = r.config.steps;
  cfg["seed"] = seed;
  std::vector<std::string> targets;
  for (const auto& t : r.config.targets) targets.push_back(t.name());
  cfg["targets"] = targets;
  cfg["gold_label_source"] = "corpus annotation";
  j["config"] = cfg;
  j["sentences"] = r.rows.size();
  j["accuracy_without"] = r.plain_accuracy;
  j["accuracy_with"] = r.intervened_accuracy;
  j["mean_abs_dlogp_nonverb"] = r.mean_abs_dlogp;
  j["max_abs_dlogp_nonverb"] = r.max_abs_dlogp;
  j["perplexity_without"] = r.plain_perplexity;
  j["perplexity_with"] = r.intervened_perplexity;
  return j.dump(2) + "\n";
}

}  // namespace agp
