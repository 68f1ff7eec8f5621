#ifndef WETE_TOOLS_CLI_HPP
#define WETE_TOOLS_CLI_HPP

namespace wete {

// Full argv-level entry point of the `wete` binary, separated from main()
// so tests can drive it in-process. Exit codes: 0 success, 1 usage/config,
// 2 IO, 3 numerical divergence.
int cli_main(int argc, const char* const* argv);

}  // namespace wete

#endif  // WETE_TOOLS_CLI_HPP
