#pragma once

#include <string>
#include <string_view>

namespace cqalog {

/// Porter stemmer (the 1980 algorithm as distributed in the reference
/// implementation, including its documented departures from the paper:
/// words of length <= 2 are left alone, step 2 maps -bli to -ble and adds
/// -logi to -log). Input must be lowercase a-z; anything else is returned
/// unchanged.
std::string porter_stem(std::string_view word);

}  // namespace cqalog
