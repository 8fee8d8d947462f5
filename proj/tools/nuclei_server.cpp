#include "scanner_server.hpp"

int main(int argc, char** argv) {
  return pentestmcp::cli::scanner_server_main(argc, argv, "pentestmcp-nuclei", pentestmcp::scan::kNucleiTimeout,
                                              [](auto backend, auto timeout) {
                                                return pentestmcp::scan::make_nuclei_server(backend, timeout);
                                              });
}
