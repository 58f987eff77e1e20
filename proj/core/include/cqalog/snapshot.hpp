#pragma once

#include <filesystem>

#include "cqalog/corpus.hpp"

namespace cqalog {

// corpus.snap: "CQAC" magic, u32 version, then length-prefixed records for
// forums, posts, users, and favorite edges. Round-trips every retained field.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

std::string serialize_corpus(const Corpus& corpus);
Corpus deserialize_corpus(const std::string& bytes);

// One JSON object per post; human-inspectable mirror of the binary snapshot.
void export_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

// Ingest-stage statistics (forums, post/question/user counts, link warnings).
std::string corpus_stats_json(const Corpus& corpus);

}  // namespace cqalog
