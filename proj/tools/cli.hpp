#ifndef FRKIT_TOOLS_CLI_HPP
#define FRKIT_TOOLS_CLI_HPP

namespace frkit::cli {

int run(int argc, char** argv);

}  // namespace frkit::cli

#endif
