#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "sitext/error.hpp"
#include "sitext/simharness.hpp"

namespace sitext {

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::parse, "traces.csv line " + std::to_string(line_no) + ": bad number \"" +
                                      field + "\"");
  }
  return value;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_traces_csv(std::span<const AccuracyTrace> traces, std::ostream& out) {
  std::vector<const AccuracyTrace*> sorted;
  for (const auto& t : traces) sorted.push_back(&t);
  std::stable_sort(sorted.begin(), sorted.end(), [](const AccuracyTrace* a, const AccuracyTrace* b) {
    return std::tuple(a->task, to_string(a->feature_mode), a->run_seed) <
           std::tuple(b->task, to_string(b->feature_mode), b->run_seed);
  });
  out << "task,mode,run_seed,iteration,accuracy\n";
  for (const AccuracyTrace* t : sorted) {
    for (std::size_t i = 0; i < t->per_iteration.size(); ++i) {
      out << csv_field(t->task) << ',' << to_string(t->feature_mode) << ',' << t->run_seed << ','
          << (i + 1) << ',' << format_double(t->per_iteration[i]) << '\n';
    }
  }
}

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out) {
  std::vector<const SummaryRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const SummaryRow* a, const SummaryRow* b) {
    return std::tuple(a->task, to_string(a->feature_mode)) <
           std::tuple(b->task, to_string(b->feature_mode));
  });
  out << "task,mode,final_mean,final_std,overall_mean,overall_std\n";
  for (const SummaryRow* r : sorted) {
    out << csv_field(r->task) << ',' << to_string(r->feature_mode) << ','
        << format_double(r->final_acc_mean) << ',' << format_double(r->final_acc_std) << ','
        << format_double(r->overall_acc_mean) << ',' << format_double(r->overall_acc_std) << '\n';
  }
}

std::vector<AccuracyTrace> read_traces_csv(std::istream& in) {
  std::vector<AccuracyTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("task,mode,run_seed,iteration,accuracy", 0) != 0) {
        throw Error(ErrorCode::parse, "traces.csv: unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw Error(ErrorCode::parse, "traces.csv line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const FeatureMode mode = parse_feature_mode(fields[1]);
    const auto seed = parse_number<std::uint64_t>(fields[2], line_no);
    const auto iteration = parse_number<std::size_t>(fields[3], line_no);
    const double accuracy = parse_number<double>(fields[4], line_no);

    if (traces.empty() || traces.back().task != fields[0] || traces.back().feature_mode != mode ||
        traces.back().run_seed != seed) {
      traces.push_back({fields[0], mode, seed, {}});
    }
    if (iteration != traces.back().per_iteration.size() + 1) {
      throw Error(ErrorCode::parse, "traces.csv line " + std::to_string(line_no) +
                                        ": iterations out of order");
    }
    traces.back().per_iteration.push_back(accuracy);
  }
  return traces;
}

void write_results(std::span<const SummaryRow> summaries, std::span<const AccuracyTrace> traces,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());
  {
    auto out = open_output(dir / "traces.csv");
    write_traces_csv(traces, out);
    if (!out) throw Error(ErrorCode::io, "failed writing traces.csv");
  }
  {
    auto out = open_output(dir / "summary.csv");
    write_summary_csv(summaries, out);
    if (!out) throw Error(ErrorCode::io, "failed writing summary.csv");
  }
}

void write_layout_csv(const Layout2D& layout, std::ostream& out) {
  out << "doc_id,x,y\n";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << csv_field(layout.doc_ids[i]) << ',' << format_double(layout.positions(r, 0)) << ','
        << format_double(layout.positions(r, 1)) << '\n';
  }
}

}  // namespace sitext
