#include "evtab/ingest.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "evtab/errors.hpp"

namespace evtab {

namespace pt = boost::property_tree;

namespace {

const std::string kGlaucomaQuery =
    "(clinical trial''[Publication Type]) AND (glaucoma[Title/Abstract]) AND (randomized OR "
    "randomised OR double-masked[Title/Abstract]) NOT (''protocol'' OR "
    "''non-randomized''[Title/Abstract])";

// The unbalanced opening parenthesis is part of the published query.
const std::string kDrugsQuery =
    "(mitomycin[Title] OR brimonidine[Title] OR brinzolamide[Title] OR dorzolamide[Title] OR "
    "carteolol[Title] OR betaxolol[Title] OR fluorouracil[Title] OR latanoprost[Title] OR "
    "bimatoprost[Title] OR travoprost[Title] OR timolol[Title] AND (randomized[Title] OR "
    "randomised[Title]) AND (''glaucoma''[MeSH Terms] OR ''glaucoma''[All Fields])";

const std::string kSurgicalQuery =
    "(randomized[Title] OR randomised[Title]) AND (trabeculectomy[Title] OR "
    "phacoemulsification[Title] OR trabeculoplasty[Title] OR phacotrabeculectomy[Title])";

// Markup that may appear inside titles and abstract bodies.
const std::regex& inline_tags() {
  static const std::regex re(R"(</?(?:i|b|u|sup|sub|em|strong|sc)(?:\s[^>]*)?/?>)",
                             std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return re;
}

pt::ptree parse_xml(std::string_view xml) {
  std::istringstream in(std::regex_replace(std::string(xml), inline_tags(), ""));
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed XML: ") + e.what());
  }
  return tree;
}

std::string text_of(const pt::ptree& node) { return squeeze_spaces(node.data()); }

std::string attribute(const pt::ptree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

std::size_t to_count(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError(std::string("bad ") + what + ": '" + s + "'");
  }
}

template <typename F>
std::string with_retries(int retries, F&& request) {
  for (int attempt = 0;; ++attempt) {
    try {
      return request();
    } catch (const RateLimited& e) {
      if (attempt >= retries) throw;
      std::this_thread::sleep_for(std::chrono::duration<double>(e.retry_after()));
    }
  }
}

}  // namespace

std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::Glaucoma: return "glaucoma";
    case SearchStrategy::PrescriptionDrugs: return "prescription-drugs";
    case SearchStrategy::SurgicalInterventions: return "surgical-interventions";
  }
  return "glaucoma";
}

std::optional<SearchStrategy> strategy_from_string(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "glaucoma") return SearchStrategy::Glaucoma;
  if (l == "drugs" || l == "prescription-drugs") return SearchStrategy::PrescriptionDrugs;
  if (l == "surgical" || l == "surgical-interventions") return SearchStrategy::SurgicalInterventions;
  return std::nullopt;
}

const std::string& build_query(SearchStrategy strategy) {
  switch (strategy) {
    case SearchStrategy::Glaucoma: return kGlaucomaQuery;
    case SearchStrategy::PrescriptionDrugs: return kDrugsQuery;
    case SearchStrategy::SurgicalInterventions: return kSurgicalQuery;
  }
  return kGlaucomaQuery;
}

HttpConfig http_config_from_env() {
  HttpConfig c;
  if (const char* url = std::getenv("EVTAB_EUTILS_URL"); url && *url) c.base_url = url;
  if (const char* key = std::getenv("EVTAB_EUTILS_API_KEY"); key && *key) c.api_key = key;
  return c;
}

HttpTransport::HttpTransport(HttpConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) {
    throw TransportError("bad endpoint URL '" + config_.base_url + "'");
  }
  scheme_host_ = m[1];
  path_prefix_ = m[2].matched ? m[2].str() : "/";
  if (path_prefix_.back() != '/') path_prefix_.push_back('/');
}

std::string HttpTransport::get(const std::string& endpoint, const QueryParams& params) {
  httplib::Client client(scheme_host_);
  client.set_follow_location(true);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Params query(params.begin(), params.end());
  if (!config_.api_key.empty()) query.emplace("api_key", config_.api_key);

  const std::string path = path_prefix_ + endpoint;
  auto res = client.Get(path, query, httplib::Headers{});
  if (!res) {
    throw TransportError(path + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    double wait = 1.0;
    if (res->has_header("Retry-After")) {
      try {
        wait = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::logic_error&) {
      }
    }
    throw RateLimited(path + ": rate limited", wait);
  }
  if (res->status != 200) {
    throw TransportError(path + ": HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string request_key(const std::string& endpoint, const QueryParams& params) {
  std::string key = endpoint;
  char sep = '?';
  for (const auto& [k, v] : params) {
    if (k == "api_key") continue;
    key += sep + k + "=" + v;
    sep = '&';
  }
  return key;
}

FixtureTransport::FixtureTransport(const std::filesystem::path& dir) : dir_(dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw TransportError("no fixture index in " + dir.string());
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [key, file] : j.items()) index_[key] = file.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("fixture index " + (dir / "index.json").string() + ": " + e.what());
  }
}

std::string FixtureTransport::get(const std::string& endpoint, const QueryParams& params) {
  const std::string key = request_key(endpoint, params);
  requests_.push_back(key);
  const auto it = index_.find(key);
  if (it == index_.end()) throw TransportError("no recorded response for " + key);
  std::ifstream in(dir_ / it->second, std::ios::binary);
  if (!in) throw TransportError("missing fixture file " + (dir_ / it->second).string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

SearchPage parse_search_response(std::string_view xml) {
  const pt::ptree tree = parse_xml(xml);
  const auto root = tree.get_child_optional("eSearchResult");
  if (!root) throw ParseError("search response has no eSearchResult element");
  if (const auto err = root->get_optional<std::string>("ERROR")) {
    throw ParseError("search error: " + *err);
  }
  SearchPage page;
  page.count = to_count(root->get<std::string>("Count", ""), "Count");
  if (const auto ids = root->get_child_optional("IdList")) {
    for (const auto& [name, node] : *ids) {
      if (name == "Id") page.ids.push_back(text_of(node));
    }
  }
  return page;
}

std::vector<RawRecord> parse_fetch_response(std::string_view xml) {
  const pt::ptree tree = parse_xml(xml);
  const auto root = tree.get_child_optional("PubmedArticleSet");
  if (!root) throw ParseError("fetch response has no PubmedArticleSet element");
  std::vector<RawRecord> out;
  for (const auto& [name, node] : *root) {
    if (name != "PubmedArticle") continue;
    const auto citation = node.get_child_optional("MedlineCitation");
    if (!citation) throw ParseError("PubmedArticle without MedlineCitation");
    RawRecord r;
    r.id = text_of(citation->get_child("PMID", pt::ptree()));
    if (r.id.empty()) throw ParseError("PubmedArticle without PMID");
    const pt::ptree& article = citation->get_child("Article", pt::ptree());
    r.title = text_of(article.get_child("ArticleTitle", pt::ptree()));
    if (const auto abs = article.get_child_optional("Abstract")) {
      for (const auto& [part, body] : *abs) {
        if (part != "AbstractText") continue;
        r.sections.push_back({attribute(body, "Label"), text_of(body)});
      }
    }
    if (r.sections.empty()) r.sections.push_back({"", ""});
    if (const auto types = article.get_child_optional("PublicationTypeList")) {
      for (const auto& [t, type] : *types) {
        if (t == "PublicationType") r.publication_types.insert(text_of(type));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawRecord> fetch(const std::string& query, Transport& transport,
                             const FetchConfig& config) {
  const std::size_t page_size = std::max<std::size_t>(config.page_size, 1);
  const std::size_t limit = config.limit.value_or(std::numeric_limits<std::size_t>::max());
  bool first_request = true;
  auto request = [&](const std::string& endpoint, const QueryParams& params) {
    if (!first_request) std::this_thread::sleep_for(config.politeness_delay);
    first_request = false;
    return with_retries(config.rate_limit_retries,
                        [&] { return transport.get(endpoint, params); });
  };

  std::vector<std::string> ids;
  for (std::size_t start = 0;;) {
    const SearchPage page = parse_search_response(request(
        "esearch.fcgi", {{"db", "pubmed"},
                         {"term", query},
                         {"retstart", std::to_string(start)},
                         {"retmax", std::to_string(page_size)}}));
    for (auto& id : page.ids) {
      if (ids.size() < limit) ids.push_back(std::move(id));
    }
    start += page.ids.size();
    if (page.ids.empty() || start >= page.count || ids.size() >= limit) break;
  }

  std::vector<RawRecord> records;
  for (std::size_t b = 0; b < ids.size(); b += page_size) {
    std::string joined;
    for (std::size_t i = b; i < std::min(ids.size(), b + page_size); ++i) {
      if (!joined.empty()) joined.push_back(',');
      joined += ids[i];
    }
    auto batch = parse_fetch_response(request(
        "efetch.fcgi", {{"db", "pubmed"}, {"id", joined}, {"retmode", "xml"}}));
    for (auto& r : batch) records.push_back(std::move(r));
  }
  return records;
}

Abstract to_abstract(const RawRecord& record) {
  std::vector<ParagraphInput> paragraphs;
  bool any_text = false;
  for (const RawSection& s : record.sections) {
    if (!trim_copy(s.body).empty()) any_text = true;
    paragraphs.push_back({s.heading, s.body});
  }
  if (!any_text) throw EmptyBody("record " + record.id + " has no abstract text");
  return make_abstract(record.id, record.title, paragraphs);
}

}  // namespace evtab
