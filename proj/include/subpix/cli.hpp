#pragma once

namespace subpix {

/// Entry point for the subpix-bench tool. Subcommands: roundtrip, sweep,
/// siamese, gradcheck, metrics, gen. Returns 0 on success, 1 on validation
/// or argument errors, 2 on I/O errors.
int cli_main(int argc, const char* const* argv);

} // namespace subpix
