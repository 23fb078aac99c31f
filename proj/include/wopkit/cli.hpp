#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wopkit/weights.hpp"

namespace wopkit {

using Json = nlohmann::json;

// Malformed or inconsistent payload.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rationals travel as strings ("-3/4") and are also accepted as JSON integers.
Json rat_to_json(const Rat& x);
Rat rat_from_json(const Json& j);
Json mat_to_json(const MatQ& m);
MatQ mat_from_json(const Json& j);
Json vec_to_json(const VecQ& v);

// {"blocks": [{"poly": [c0, c1, ...], "partition": [...]}], "n": n, "p": p}.
// Input also accepts {"nilpotent": [...]} and {"zero": n}; p comes from the payload when absent.
Json orbit_to_json(const OrbitDatum& d);
OrbitDatum orbit_from_json(const Json& j, long p);
// Index lists; a parabolic also carries its block sizes.
Json parabolic_to_json(const Parabolic& p);
Parabolic parabolic_from_json(const Json& j, int n);
Levi levi_from_json(const Json& j, int n);
// Exact string, decimal with l = log p, and coefficient lists per radicand.
Json surd_to_json(const Surd& s, long p);
Json family_to_json(const ExpPolyFamily& f);

// Exit status: 0 success, 1 computation error, 2 usage error, 3 schema error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wopkit
