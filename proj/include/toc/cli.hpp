#pragma once

namespace toc {

/// Entry point of the toc command. Exit codes: 0 success, 1 config, corpus
/// or record failure, 2 usage error.
int run_cli(int argc, char** argv);

}  // namespace toc
