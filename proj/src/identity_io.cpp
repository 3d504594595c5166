#include "json.hpp"

#include "fabius/identity.hpp"

namespace fabius {

using nlohmann::json;

namespace {

json coeffs_to_json(const std::vector<ExactRational>& coeffs) {
  json out = json::array();
  for (const auto& c : coeffs) out.push_back(c.to_string());
  return out;
}

std::vector<ExactRational> coeffs_from_json(const json& j) {
  std::vector<ExactRational> out;
  for (const auto& item : j) {
    try {
      out.push_back(ExactRational::parse(item.get<std::string>()));
    } catch (const ParseError& e) {
      throw CorruptTable(e.what());
    }
  }
  return out;
}

}  // namespace

std::string table_to_json(const IdentityTable& t, int indent) {
  json levels = json::array();
  for (int n = 1; n <= t.max_n(); ++n) {
    const IdentityLevel& lvl = t.level(n);
    levels.push_back({{"n", n},
                      {"sigma_s", lvl.sum.sigma},
                      {"s", coeffs_to_json(lvl.sum.coeffs)},
                      {"sigma_d", lvl.diff.sigma},
                      {"d", coeffs_to_json(lvl.diff.coeffs)}});
  }
  return json{{"max_n", t.max_n()}, {"levels", std::move(levels)}}.dump(indent);
}

IdentityTable table_from_json(const std::string& text) {
  std::vector<IdentityLevel> levels;
  try {
    const json doc = json::parse(text);
    const int max_n = doc.at("max_n").get<int>();
    const json& entries = doc.at("levels");
    if (!entries.is_array() || static_cast<int>(entries.size()) != max_n) {
      throw CorruptTable("level count does not match max_n");
    }
    for (const json& e : entries) {
      IdentityLevel lvl;
      lvl.sum.n = e.at("n").get<int>();
      lvl.diff.n = lvl.sum.n;
      lvl.sum.sigma = e.at("sigma_s").get<std::int64_t>();
      lvl.diff.sigma = e.at("sigma_d").get<std::int64_t>();
      lvl.sum.coeffs = coeffs_from_json(e.at("s"));
      lvl.diff.coeffs = coeffs_from_json(e.at("d"));
      if (lvl.diff.coeffs.empty()) {
        throw CorruptTable("empty difference identity");
      }
      lvl.small_odd_value = small_odd_value(lvl.diff);
      levels.push_back(std::move(lvl));
    }
  } catch (const json::exception& e) {
    throw CorruptTable(std::string("malformed table JSON: ") + e.what());
  }
  return IdentityTable::from_levels(std::move(levels));
}

}  // namespace fabius
