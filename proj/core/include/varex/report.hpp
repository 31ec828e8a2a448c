#pragma once

#include <string>
#include <vector>

#include "varex/suites.hpp"

namespace varex {

/// 17 significant digits: round-trips any double through text.
std::string format_double(double v);

/// Writes content to a temp file in the target directory and renames it
/// into place, so readers never observe partial reports.
void write_text_atomic(const std::string& path, const std::string& content);

std::string suite_rows_csv(const std::vector<suites::SuiteRow>& rows);

}  // namespace varex
