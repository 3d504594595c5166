#include "fabius/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fabius/evaluator.hpp"
#include "fabius/identity.hpp"
#include "fabius/oracle.hpp"
#include "json.hpp"

namespace fabius::cli {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

[[noreturn]] void malformed(std::string_view token, std::string_view what) {
  throw ParseError(std::string(token), "malformed " + std::string(what) +
                                           " '" + std::string(token) + "'");
}

}  // namespace

ExactRational parse_real_literal(std::string_view text) {
  std::string_view body = text;
  const bool negative = !body.empty() && body.front() == '-';
  if (negative) body.remove_prefix(1);

  ExactRational value;
  if (const auto slash = body.find('/'); slash != std::string_view::npos) {
    const std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!all_digits(num)) malformed(text, "number");
    if (den.starts_with("2^")) {
      den.remove_prefix(2);
      if (!all_digits(den) || den.size() > 9) malformed(text, "number");
      value = ExactRational(BigInt(std::string(num), 10))
                  .scaled_pow2(-std::stoll(std::string(den)));
    } else {
      if (!all_digits(den)) malformed(text, "number");
      const BigInt d(std::string(den), 10);
      if (sgn(d) == 0) {
        throw ParseError(std::string(text),
                         "zero denominator in '" + std::string(text) + "'");
      }
      value = ExactRational(BigInt(std::string(num), 10), d);
    }
  } else if (const auto dot = body.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = body.substr(0, dot);
    const std::string_view frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      malformed(text, "number");
    }
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    const BigInt digits(std::string(whole) + std::string(frac) + "0", 10);
    // The appended 0 keeps empty parts parseable; divide it back out.
    value = ExactRational(digits, scale * 10);
  } else {
    if (!all_digits(body)) malformed(text, "number");
    value = ExactRational(BigInt(std::string(body), 10));
  }
  return negative ? -value : value;
}

DyadicRational parse_dyadic_literal(std::string_view text) {
  const ExactRational value = parse_real_literal(text);
  if (value.sign() < 0) {
    throw DomainError("argument '" + std::string(text) +
                      "' is negative; f is evaluated on [0, inf)");
  }
  auto d = DyadicRational::from_rational(value);
  if (!d) {
    throw DomainError("argument '" + std::string(text) + "' = " +
                      value.to_string() +
                      " is not a dyadic rational k/2^m; use 'approx' for a "
                      "value with a certified error bound");
  }
  return *d;
}

namespace {

enum class Format { kPretty, kJson, kCsv };

struct Settings {
  Format format = Format::kPretty;
  std::size_t digits = 12;
  std::string cache_path;
};

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  return Format::kPretty;
}

std::optional<IdentityTable> load_cache(const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptTable("cannot read cache file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return table_from_json(text.str());
  } catch (const CorruptTable& e) {
    throw CorruptTable("cache file " + path + ": " + e.what());
  }
}

void store_cache(const std::string& path, const IdentityTable& t) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file " + tmp);
    out << table_to_json(t) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

IdentityTable initial_table(const Settings& s) {
  if (auto cached = load_cache(s.cache_path)) return std::move(*cached);
  return IdentityTable{};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

int cmd_eval(const Settings& s, const std::string& literal, bool decimal,
             std::ostream& out) {
  const DyadicRational arg = parse_dyadic_literal(literal);
  const Evaluator ev({}, initial_table(s));
  const ExactRational value = ev.eval_extended(arg);
  const std::string dec = to_decimal_string(value, s.digits);
  switch (s.format) {
    case Format::kPretty:
      out << value << '\n';
      if (decimal) out << dec << '\n';
      break;
    case Format::kJson:
      out << nlohmann::json{{"argument", arg.to_rational().to_string()},
                            {"value", value.to_string()},
                            {"decimal", dec}}
                 .dump()
          << '\n';
      break;
    case Format::kCsv:
      out << "argument,numerator,denominator,decimal\n"
          << arg.to_rational().to_string() << ',' << value.numerator() << ','
          << value.denominator() << ',' << dec << '\n';
      break;
  }
  return kExitOk;
}

std::string pretty_polynomial(const std::vector<ExactRational>& coeffs,
                              int first_power) {
  std::string out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const int power = first_power + 2 * static_cast<int>(k);
    if (k > 0) out += " + ";
    out += coeffs[k].to_string();
    if (power == 1) out += " x";
    if (power > 1) out += " x^" + std::to_string(power);
  }
  return out;
}

int cmd_table(const Settings& s, int max_n, bool stats, std::ostream& out,
              std::ostream& err) {
  IdentityTable table = initial_table(s);
  const int loaded = table.max_n();
  int computed = 0;
  if (max_n > loaded) {
    table = extend_table(std::move(table), max_n);
    computed = max_n - loaded;
    if (!s.cache_path.empty()) store_cache(s.cache_path, table);
  }
  const IdentityTable shown = table.prefix(max_n);

  switch (s.format) {
    case Format::kPretty:
      for (int n = 1; n <= shown.max_n(); ++n) {
        const IdentityLevel& lvl = shown.level(n);
        out << "n=" << n << "  S: 2^" << lvl.sum.sigma << " = "
            << pretty_polynomial(lvl.sum.coeffs, 0) << '\n';
        out << "n=" << n << "  D: 2^" << lvl.diff.sigma << " = "
            << pretty_polynomial(lvl.diff.coeffs, 1) << '\n';
      }
      break;
    case Format::kJson:
      out << table_to_json(shown) << '\n';
      break;
    case Format::kCsv:
      out << "kind,n,sigma,power,coefficient\n";
      for (int n = 1; n <= shown.max_n(); ++n) {
        const IdentityLevel& lvl = shown.level(n);
        for (std::size_t k = 0; k < lvl.sum.coeffs.size(); ++k) {
          out << "S," << n << ',' << lvl.sum.sigma << ',' << 2 * k << ','
              << lvl.sum.coeffs[k] << '\n';
        }
        for (std::size_t k = 0; k < lvl.diff.coeffs.size(); ++k) {
          out << "D," << n << ',' << lvl.diff.sigma << ',' << 2 * k + 1 << ','
              << lvl.diff.coeffs[k] << '\n';
        }
      }
      break;
  }
  if (stats) {
    err << "levels loaded: " << loaded << ", computed: " << computed << '\n';
  }
  return kExitOk;
}

int cmd_values(const Settings& s, int m, int limit, std::ostream& out,
               std::ostream& err) {
  if (m < 0 || m > limit) {
    err << "error: exponent " << m << " outside [0, " << limit
        << "] (raise --limit to allow more)\n";
    return kExitUsage;
  }
  const Evaluator ev({}, initial_table(s));
  const auto exponent = static_cast<std::uint64_t>(m);
  bool first = true;
  if (s.format == Format::kCsv) out << "j,numerator,denominator,decimal\n";
  if (s.format == Format::kJson) out << "[";
  ev.for_each_value_at_denominator(exponent, [&](const FabiusValue& v) {
    const BigInt j = v.argument.numerator()
                     << static_cast<mp_bitcnt_t>(exponent - v.argument.exponent());
    const std::string dec = to_decimal_string(v.value, s.digits);
    switch (s.format) {
      case Format::kPretty:
        out << j << "/2^" << m << "  " << v.value << "  " << dec << '\n';
        break;
      case Format::kCsv:
        out << j << ',' << v.value.numerator() << ','
            << v.value.denominator() << ',' << dec << '\n';
        break;
      case Format::kJson:
        out << (first ? "\n" : ",\n")
            << nlohmann::json{{"j", j.get_str()},
                              {"numerator", v.value.numerator().get_str()},
                              {"denominator", v.value.denominator().get_str()},
                              {"decimal", dec}}
                   .dump();
        break;
    }
    first = false;
  });
  if (s.format == Format::kJson) out << "\n]\n";
  return kExitOk;
}

// Lines "argument,value"; blank lines and '#' comments are skipped.
std::vector<GoldenValue> read_expectations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot read expectations file '" + path + "'");
  std::vector<GoldenValue> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(line, "expected 'argument,value' in '" + line + "'");
    }
    out.push_back({parse_dyadic_literal(line.substr(0, comma)),
                   ExactRational::parse(line.substr(comma + 1))});
  }
  return out;
}

int cmd_verify(const Settings& s, bool golden, std::optional<int> identities,
               std::optional<int> oracle,
               const std::optional<std::string>& expect_file,
               std::ostream& out, std::ostream& err) {
  if (!golden && !identities && !oracle && !expect_file) {
    golden = true;
    identities = 5;
    oracle = 12;
  }
  if (oracle && (*oracle < 1 || *oracle > kMaxOracleLevel)) {
    err << "error: --oracle level must be in [1, " << kMaxOracleLevel << "]\n";
    return kExitUsage;
  }
  if (identities && *identities < 1) {
    err << "error: --identities level must be >= 1\n";
    return kExitUsage;
  }

  std::vector<VerificationReport> reports;
  const Evaluator ev({}, initial_table(s));
  if (golden) reports.push_back(verify_golden(ev));
  if (expect_file) {
    reports.push_back(verify_golden(ev, read_expectations(*expect_file)));
    reports.back().suite = "expected-values";
    reports.back().provenance = *expect_file;
  }
  if (identities) {
    // Pure descent, so the reflection cross-check is a separate route.
    const Evaluator plain({.reflect_upper_half = false}, ev.table_snapshot());
    std::vector<DyadicRational> xs;
    for (unsigned long j = 0; j <= 16; ++j) xs.emplace_back(BigInt(j), 4);
    reports.push_back(verify_identities(plain, *identities, xs));
  }
  if (oracle) reports.push_back(verify_oracle(ev, *oracle));

  bool all_pass = true;
  if (s.format == Format::kJson) out << "[";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    all_pass = all_pass && r.pass();
    switch (s.format) {
      case Format::kJson:
        out << (i ? ",\n" : "\n") << report_to_json(r);
        break;
      case Format::kCsv:
        if (i == 0) out << "suite,cases,failures,pass\n";
        out << r.suite << ',' << r.cases << ',' << r.failures.size() << ','
            << (r.pass() ? "true" : "false") << '\n';
        break;
      case Format::kPretty:
        out << r.suite << ": " << (r.cases - r.failures.size()) << '/'
            << r.cases << (r.pass() ? " pass" : " FAIL") << "  ("
            << r.provenance << ")\n";
        for (const auto& f : r.failures) {
          out << "  input " << f.input << ": expected " << f.expected
              << ", got " << f.got << '\n';
        }
        break;
    }
  }
  if (s.format == Format::kJson) out << "\n]\n";
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_approx(const Settings& s, const std::string& x_text,
               const std::string& eps_text, std::ostream& out) {
  const ExactRational x = parse_real_literal(x_text);
  const ExactRational eps = parse_real_literal(eps_text);
  const Evaluator ev({}, initial_table(s));
  const ApproxResult r = ev.approx_eval(x, eps);
  const std::string dec = to_decimal_string(r.value, s.digits);
  switch (s.format) {
    case Format::kPretty:
      out << "query        " << r.query << '\n'
          << "anchor       " << r.anchor.to_rational() << '\n'
          << "value        " << r.value << '\n'
          << "decimal      " << dec << '\n'
          << "error_bound  " << r.error_bound << '\n';
      break;
    case Format::kJson:
      out << nlohmann::json{{"query", r.query.to_string()},
                            {"anchor", r.anchor.to_rational().to_string()},
                            {"value", r.value.to_string()},
                            {"decimal", dec},
                            {"error_bound", r.error_bound.to_string()}}
                 .dump()
          << '\n';
      break;
    case Format::kCsv:
      out << "query,anchor,value,decimal,error_bound\n"
          << csv_quote(r.query.to_string()) << ','
          << r.anchor.to_rational() << ',' << r.value << ',' << dec << ','
          << r.error_bound << '\n';
      break;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exact values of the Fabius function at dyadic rationals",
               "fabius"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string format = "pretty";
  Settings settings;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"pretty", "json", "csv"}));
  app.add_option("--digits", settings.digits, "Decimal digits for display")
      ->check(CLI::Range(1, 10000));
  app.add_option("--cache", settings.cache_path, "Identity-table cache file")
      ->envname(kCacheEnv);

  std::string eval_arg;
  bool eval_decimal = false;
  auto* eval = app.add_subcommand("eval", "Exact f at a dyadic rational");
  eval->add_option("x", eval_arg, "e.g. 5/16, 0.3125 or 5/2^4")->required();
  eval->add_flag("--decimal", eval_decimal, "Also print a decimal expansion");

  int table_n = 1;
  bool table_stats = false;
  auto* table = app.add_subcommand("table", "Sum/difference identity tables");
  table->add_option("max_n", table_n, "Highest level")
      ->required()
      ->check(CLI::PositiveNumber);
  table->add_flag("--stats", table_stats, "Report cached vs computed levels");

  int values_m = 0;
  int values_limit = 20;
  auto* values = app.add_subcommand("values", "All f(j/2^m), j = 0..2^m");
  values->add_option("m", values_m, "Denominator exponent")->required();
  values->add_option("--limit", values_limit, "Largest accepted exponent");

  bool verify_golden_flag = false;
  std::optional<int> verify_identities_n;
  std::optional<int> verify_oracle_n;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_flag("--golden", verify_golden_flag, "Published value table");
  verify->add_option("--identities", verify_identities_n,
                     "Identity consistency up to this level");
  verify->add_option("--oracle", verify_oracle_n,
                     "CDF bracket oracle with this many terms");
  std::optional<std::string> verify_expect;
  verify->add_option("--expect", verify_expect,
                     "CSV of 'argument,value' pairs to check exactly");

  std::string approx_x;
  std::string approx_eps;
  auto* approx = app.add_subcommand("approx", "f(x) with certified error bound");
  approx->add_option("x", approx_x, "Nonnegative decimal or fraction")
      ->required();
  approx->add_option("eps", approx_eps, "Error tolerance")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  settings.format = parse_format(format);

  try {
    if (*eval) return cmd_eval(settings, eval_arg, eval_decimal, out);
    if (*table) return cmd_table(settings, table_n, table_stats, out, err);
    if (*values) return cmd_values(settings, values_m, values_limit, out, err);
    if (*verify) {
      return cmd_verify(settings, verify_golden_flag, verify_identities_n,
                        verify_oracle_n, verify_expect, out, err);
    }
    if (*approx) return cmd_approx(settings, approx_x, approx_eps, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CorruptTable& e) {
    err << "error: corrupt identity table: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fabius::cli
