#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evtab/corpus.hpp"

namespace evtab {

enum class SearchStrategy { Glaucoma, PrescriptionDrugs, SurgicalInterventions };

inline constexpr SearchStrategy kAllStrategies[] = {
    SearchStrategy::Glaucoma, SearchStrategy::PrescriptionDrugs,
    SearchStrategy::SurgicalInterventions};

std::string_view to_string(SearchStrategy s);
// Accepts "glaucoma", "drugs" / "prescription-drugs", "surgical" /
// "surgical-interventions".
std::optional<SearchStrategy> strategy_from_string(std::string_view s);

// The literature-database query for a strategy, byte-identical on every call.
const std::string& build_query(SearchStrategy strategy);

struct RawSection {
  std::string heading;  // empty for an unlabeled body
  std::string body;

  friend bool operator==(const RawSection&, const RawSection&) = default;
};

struct RawRecord {
  std::string id;
  std::string title;
  std::vector<RawSection> sections;
  std::set<std::string> publication_types;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

using QueryParams = std::vector<std::pair<std::string, std::string>>;

// One GET against the literature API. `endpoint` is a utility name such as
// "esearch.fcgi"; implementations own the base URL and credentials.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string get(const std::string& endpoint, const QueryParams& params) = 0;
};

struct HttpConfig {
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/";
  std::string api_key;  // sent as api_key when non-empty
  std::chrono::seconds timeout{30};
};

// Reads EVTAB_EUTILS_URL and EVTAB_EUTILS_API_KEY over the defaults.
HttpConfig http_config_from_env();

// HTTPS transport. Throws TransportError on network failures and non-200
// statuses, RateLimited on 429 with the Retry-After value (1 s if absent).
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(HttpConfig config = http_config_from_env());
  std::string get(const std::string& endpoint, const QueryParams& params) override;

 private:
  HttpConfig config_;
  std::string scheme_host_;
  std::string path_prefix_;
};

// Recorded responses. `dir/index.json` maps request keys to file names in
// `dir`; a request with no entry throws TransportError.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(const std::filesystem::path& dir);
  std::string get(const std::string& endpoint, const QueryParams& params) override;
  const std::vector<std::string>& requests() const { return requests_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> index_;
  std::vector<std::string> requests_;
};

// "endpoint?k=v&k=v" with raw values in parameter order; api_key is omitted.
std::string request_key(const std::string& endpoint, const QueryParams& params);

struct FetchConfig {
  std::size_t page_size = 100;  // ids per search page and per fetch batch
  std::chrono::milliseconds politeness_delay{340};
  int rate_limit_retries = 0;        // extra attempts after RateLimited
  std::optional<std::size_t> limit;  // stop after this many ids
};

// Every record matching `query`, in search order. Search pages and fetch
// batches are requested sequentially with the politeness delay between them.
std::vector<RawRecord> fetch(const std::string& query, Transport& transport,
                             const FetchConfig& config = {});

struct SearchPage {
  std::size_t count = 0;  // total hits
  std::vector<std::string> ids;
};

// Response parsers; both throw ParseError on malformed XML.
SearchPage parse_search_response(std::string_view xml);
std::vector<RawRecord> parse_fetch_response(std::string_view xml);

// Paragraphs in record order, headings classified by section_class; gold
// labels are all O. structured iff at least two sections carry a heading.
// Throws EmptyBody when every body is blank.
Abstract to_abstract(const RawRecord& record);

}  // namespace evtab
