#include "poserefer/error.hpp"
#include "poserefer/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace poserefer {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_opt(const std::optional<MeanStd>& m, bool std_part, int digits = 4) {
  if (!m) return "";
  return fmt(std_part ? m->stddev : m->mean, digits);
}

std::string pm(const std::optional<MeanStd>& m, int digits = 1) {
  if (!m) return "n/a";
  return fmt(m->mean, digits) + " ± " + fmt(m->stddev, digits);
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[i % 8];
}

}  // namespace

void write_results_jsonl(const std::vector<ResultRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const ResultRecord& r : records) {
    const json j = {{"ref_id", r.ref_id},
                    {"config", r.config_name},
                    {"seed", r.seed},
                    {"fold", r.fold},
                    {"rank", r.rank_of_target},
                    {"candidates", r.candidates},
                    {"tier", to_string(r.tier)},
                    {"ref_type", to_string(r.ref_type)}};
    out << j.dump() << '\n';
  }
}

std::vector<ResultRecord> read_results_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ResultRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ResultRecord r;
      r.ref_id = j.at("ref_id").get<std::string>();
      r.config_name = j.at("config").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.fold = j.at("fold").get<std::size_t>();
      r.rank_of_target = j.at("rank").get<std::size_t>();
      r.candidates = j.at("candidates").get<std::size_t>();
      r.tier = parse_tier(j.at("tier").get<std::string>());
      r.ref_type = parse_ref_type(j.at("ref_type").get<std::string>());
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

void write_report_csv(const ReportTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "config,axis,stratum,n,top1_mean,top1_std,top5_mean,top5_std,alpha_mean,alpha_std\n";
  for (const ConfigRow& r : table.rows) {
    out << r.config_name << ",all,all,," << fmt(r.top1.mean) << ',' << fmt(r.top1.stddev) << ','
        << fmt(r.top5.mean) << ',' << fmt(r.top5.stddev) << ',' << fmt_opt(r.alpha, false) << ','
        << fmt_opt(r.alpha, true) << '\n';
  }
  for (const StratumRow& s : table.strata) {
    out << s.config_name << ',' << s.axis << ',' << s.label << ',' << s.n << ',' << fmt_opt(s.top1, false) << ','
        << fmt_opt(s.top1, true) << ",,,,\n";
  }
}

void write_ttests_csv(const ReportTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "config_a,config_b,mean_difference,t,df,p_two_sided,note\n";
  for (const TTestRow& t : table.ttests) {
    out << t.config_a << ',' << t.config_b << ',';
    if (t.result) {
      out << fmt(t.result->mean_difference) << ',' << fmt(t.result->t) << ',' << t.result->df << ','
          << fmt(t.result->p_two_sided, 6);
    } else {
      out << ",,,";
    }
    out << ',' << t.note << '\n';
  }
}

void write_report_md(const ReportTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# Results\n\n## Aggregate accuracy\n\n";
  out << "| Config | Top-1 | Top-5 | alpha |\n|---|---|---|---|\n";
  for (const ConfigRow& r : table.rows) {
    out << "| " << r.config_name << " | " << pm(r.top1) << " | " << pm(r.top5) << " | "
        << (r.alpha ? pm(r.alpha, 3) : std::string("-")) << " |\n";
  }
  const std::pair<const char*, const char*> axes[] = {
      {"tier", "Top-1 by gesture tier"}, {"ref_type", "Top-1 by reference type"}, {"regime", "Top-1 by regime"}};
  for (const auto& [axis, title] : axes) {
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> n_of;
    for (const StratumRow& s : table.strata) {
      if (s.axis != axis) continue;
      if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) labels.push_back(s.label);
      n_of[s.label] = s.n;
    }
    if (labels.empty()) continue;
    out << "\n## " << title << "\n\n| Config |";
    for (const auto& l : labels) out << ' ' << l << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < labels.size(); ++i) out << "---|";
    out << "\n| n |";
    for (const auto& l : labels) out << ' ' << n_of[l] << " |";
    out << '\n';
    for (const ConfigRow& r : table.rows) {
      out << "| " << r.config_name << " |";
      for (const auto& l : labels) {
        const StratumRow* s = table.stratum(r.config_name, axis, l);
        out << ' ' << (s ? pm(s->top1) : std::string("n/a")) << " |";
      }
      out << '\n';
    }
  }
  if (!table.ttests.empty()) {
    out << "\n## Paired t-tests (top-1 over seeds)\n\n| A | B | mean diff | t | df | p |\n|---|---|---|---|---|---|\n";
    for (const TTestRow& t : table.ttests) {
      out << "| " << t.config_a << " | " << t.config_b << " | ";
      if (t.result) {
        out << fmt(t.result->mean_difference, 2) << " | " << fmt(t.result->t, 2) << " | " << t.result->df << " | "
            << fmt(t.result->p_two_sided, 4) << " |\n";
      } else {
        out << t.note << " | | | |\n";
      }
    }
  }
}

void write_alpha_trace_csv(const std::vector<CellResult>& cells, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "config,seed,fold,epoch,alpha\n";
  for (const CellResult& c : cells) {
    for (std::size_t e = 0; e < c.alpha_trace.size(); ++e) {
      out << c.config_name << ',' << c.seed << ',' << c.fold << ',' << e << ',' << fmt(c.alpha_trace[e], 6) << '\n';
    }
  }
}

void write_alpha_trace_svg(const std::vector<CellResult>& cells, const std::filesystem::path& path) {
  constexpr double W = 640, H = 360, L = 50, R = 150, T = 20, B = 40;
  std::size_t epochs = 1;
  std::vector<std::string> configs;
  for (const CellResult& c : cells) {
    if (c.alpha_trace.empty()) continue;
    epochs = std::max(epochs, c.alpha_trace.size());
    if (std::find(configs.begin(), configs.end(), c.config_name) == configs.end()) configs.push_back(c.config_name);
  }
  auto x = [&](std::size_t e) { return L + (W - L - R) * (epochs > 1 ? double(e) / double(epochs - 1) : 0.0); };
  auto y = [&](double a) { return T + (H - T - B) * (1.0 - a); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << W - R << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L << "\" y2=\"" << y(1) << "\" stroke=\"black\"/>\n";
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    s << "<text x=\"" << L - 8 << "\" y=\"" << y(a) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(a, 2)
      << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\" text-anchor=\"middle\">epoch</text>\n";
  for (const CellResult& c : cells) {
    if (c.alpha_trace.empty()) continue;
    const auto idx = static_cast<std::size_t>(std::find(configs.begin(), configs.end(), c.config_name) - configs.begin());
    s << "<polyline fill=\"none\" stroke-opacity=\"0.5\" stroke=\"" << palette(idx) << "\" points=\"";
    for (std::size_t e = 0; e < c.alpha_trace.size(); ++e) s << fmt(x(e), 1) << ',' << fmt(y(c.alpha_trace[e]), 1) << ' ';
    s << "\"/>\n";
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const double ly = T + 16.0 * double(i + 1);
    s << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << palette(i) << "\"/>\n";
    s << "<text x=\"" << W - R + 26 << "\" y=\"" << ly << "\" font-size=\"11\">" << configs[i] << "</text>\n";
  }
  s << "</svg>\n";
  auto out = open_out(path);
  out << s.str();
}

void write_tier_bars_svg(const ReportTable& table, const std::filesystem::path& path) {
  const std::vector<std::string> tiers = {"T1", "T2", "T3", "T4", "T5"};
  constexpr double W = 640, H = 360, L = 50, R = 150, T = 20, B = 40;
  double top = 10.0;
  for (const StratumRow& s : table.strata) {
    if (s.axis == "tier" && s.top1) top = std::max(top, s.top1->mean);
  }
  top = std::ceil(top / 10.0) * 10.0;
  const std::size_t nc = std::max<std::size_t>(1, table.rows.size());
  const double group = (W - L - R) / double(tiers.size());
  const double bar = group * 0.8 / double(nc);
  auto y = [&](double v) { return T + (H - T - B) * (1.0 - v / top); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << W - R << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = top * k / 4.0;
    s << "<text x=\"" << L - 8 << "\" y=\"" << y(v) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(v, 0)
      << "</text>\n";
  }
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    const double gx = L + group * double(t) + group * 0.1;
    s << "<text x=\"" << gx + group * 0.4 << "\" y=\"" << H - 20 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << tiers[t] << "</text>\n";
    for (std::size_t c = 0; c < table.rows.size(); ++c) {
      const StratumRow* st = table.stratum(table.rows[c].config_name, "tier", tiers[t]);
      if (st == nullptr || !st->top1) continue;
      const double v = st->top1->mean;
      s << "<rect x=\"" << fmt(gx + bar * double(c), 1) << "\" y=\"" << fmt(y(v), 1) << "\" width=\"" << fmt(bar, 1)
        << "\" height=\"" << fmt(y(0) - y(v), 1) << "\" fill=\"" << palette(c) << "\"/>\n";
    }
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double ly = T + 16.0 * double(i + 1);
    s << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << palette(i) << "\"/>\n";
    s << "<text x=\"" << W - R + 26 << "\" y=\"" << ly << "\" font-size=\"11\">" << table.rows[i].config_name
      << "</text>\n";
  }
  s << "</svg>\n";
  auto out = open_out(path);
  out << s.str();
}

void write_matrix_outputs(const MatrixResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_results_jsonl(result.records, dir / "results.jsonl");
  write_report_csv(result.report, dir / "report.csv");
  write_report_md(result.report, dir / "report.md");
  write_ttests_csv(result.report, dir / "ttests.csv");
  write_alpha_trace_csv(result.cells, dir / "alphatrace.csv");
  write_alpha_trace_svg(result.cells, dir / "alphatrace.svg");
  write_tier_bars_svg(result.report, dir / "tier_bars.svg");
}

}  // namespace poserefer
