#pragma once

#include <string_view>

namespace evtab::data {

// Contents of data/*.tsv, compiled in so the library has no runtime data path.
extern const std::string_view kAbbreviationsTsv;
extern const std::string_view kGazetteerTsv;

}  // namespace evtab::data
