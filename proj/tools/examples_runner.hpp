#ifndef FRKIT_TOOLS_EXAMPLES_RUNNER_HPP
#define FRKIT_TOOLS_EXAMPLES_RUNNER_HPP

#include <string>
#include <vector>

#include "frkit/json_io.hpp"

namespace frkit::cli {

const char* embedded_fixtures_json();  // generated from fixtures.json

struct CheckOutcome {
    std::string name;
    bool pass = false;
    std::string got;
    std::string expect;
};

struct ExampleOutcome {
    std::string id;
    bool pass = true;
    std::vector<CheckOutcome> checks;
};

std::vector<std::string> example_ids();

/// Compute the values of one example and diff them against its fixture
/// entry ({"checks": {name: expected}}).
ExampleOutcome run_example(const std::string& id, const Json& fixture);

/// Load fixtures from FRKIT_FIXTURES when set, else the embedded copy.
Json load_fixtures();

}  // namespace frkit::cli

#endif
