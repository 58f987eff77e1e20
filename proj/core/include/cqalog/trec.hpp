#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cqalog/index.hpp"
#include "cqalog/synthesis.hpp"

namespace cqalog {

// TREC run rows: `query_id Q0 doc_id rank score tag`.
std::string write_run(const std::vector<RunEntry>& entries);
std::vector<RunEntry> read_run(std::string_view contents);

// TREC qrels rows: `query_id 0 doc_id grade`.
std::string write_qrels(const std::vector<QrelRow>& rows);
std::vector<QrelRow> read_qrels(std::string_view contents);

}  // namespace cqalog
