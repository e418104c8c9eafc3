#pragma once

#include <filesystem>

#include <json.hpp>

#include "mininfo/mdp.hpp"

namespace mininfo {

using Json = nlohmann::json;

/// Parses the JSON model format. Rows whose probabilities sum to within
/// 1e-6 of one are renormalized; larger deviations are kept so that
/// validate() reports them. Structural problems (unknown states, duplicate
/// (from, action) pairs, wrong types) throw ParseError.
Mdp mdp_from_json(const Json& doc);
Mdp load_mdp(const std::filesystem::path& path);
Json mdp_to_json(const Mdp& mdp);

/// {"state": {"action": p, ...}, ...}
Json policy_to_json(const Mdp& mdp, const StationaryPolicy& policy);
/// Inverse of policy_to_json. Every state must be present; rows are
/// renormalized within 1e-6. Throws InvalidPolicy on mismatch.
StationaryPolicy policy_from_json(const Mdp& mdp, const Json& doc);

/// Finite values as numbers, +inf as the string "inf".
Json ext_real_to_json(const ExtReal& v);
ExtReal ext_real_from_json(const Json& v);

Json read_json_file(const std::filesystem::path& path);

}  // namespace mininfo
