#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ppcm/bart.hpp"
#include "ppcm/error.hpp"

namespace ppcm::bart {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "ppcm-ensemble";
constexpr int kVersion = 1;

const char* kind_name(OutcomeKind k) { return k == OutcomeKind::kContinuous ? "continuous" : "probit"; }

OutcomeKind parse_kind(const std::string& s) {
  if (s == "continuous") return OutcomeKind::kContinuous;
  if (s == "probit") return OutcomeKind::kProbit;
  throw ParseError("unknown ensemble kind '" + s + "'");
}

}  // namespace

std::string ensemble_to_json(const PosteriorEnsemble& ensemble) {
  json draws = json::array();
  for (const auto& f : ensemble.draws()) {
    json trees = json::array();
    for (const auto& t : f.trees) {
      // each node as [var, left, value]
      json nodes = json::array();
      for (const auto& nd : t.nodes()) nodes.push_back(json::array({nd.var, nd.left, nd.value}));
      trees.push_back(std::move(nodes));
    }
    draws.push_back({{"sigma", f.sigma}, {"offset", f.offset}, {"split_probs", f.split_probs}, {"trees", trees}});
  }
  json doc = {{"format", kFormat},
              {"version", kVersion},
              {"kind", kind_name(ensemble.kind())},
              {"predictors", ensemble.predictors()},
              {"draws", std::move(draws)}};
  return doc.dump();
}

PosteriorEnsemble ensemble_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("ensemble JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw ParseError("not a ppcm ensemble document");
    const int version = doc.at("version").get<int>();
    if (version != kVersion) throw ParseError("unsupported ensemble version " + std::to_string(version));
    const OutcomeKind kind = parse_kind(doc.at("kind").get<std::string>());
    const auto predictors = doc.at("predictors").get<std::size_t>();
    std::vector<Forest> draws;
    for (const auto& d : doc.at("draws")) {
      Forest f;
      f.kind = kind;
      f.sigma = d.at("sigma").get<double>();
      f.offset = d.at("offset").get<double>();
      f.split_probs = d.at("split_probs").get<std::vector<double>>();
      for (const auto& t : d.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const auto& nd : t) {
          nodes.push_back(TreeNode{nd.at(0).get<std::int32_t>(), nd.at(1).get<std::int32_t>(), nd.at(2).get<double>()});
        }
        f.trees.emplace_back(std::move(nodes));
      }
      f.validate();
      draws.push_back(std::move(f));
    }
    return PosteriorEnsemble(kind, predictors, std::move(draws));
  } catch (const json::exception& e) {
    throw ParseError(std::string("ensemble JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("ensemble JSON: ") + e.what());
  }
}

void save_ensemble(const std::string& path, const PosteriorEnsemble& ensemble) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << ensemble_to_json(ensemble);
  if (!out) throw Error("failed writing '" + path + "'");
}

PosteriorEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ensemble_from_json(ss.str());
}

}  // namespace ppcm::bart
