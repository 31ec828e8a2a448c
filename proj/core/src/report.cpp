#include "varex/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace varex {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

std::string suite_rows_csv(const std::vector<suites::SuiteRow>& rows) {
  std::ostringstream os;
  os << "suite,case_id,lhs,rhs,pass\n";
  for (const auto& r : rows) {
    os << r.suite << ',' << r.case_id << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << (r.pass ? "1" : "0") << '\n';
  }
  return os.str();
}

}  // namespace varex
