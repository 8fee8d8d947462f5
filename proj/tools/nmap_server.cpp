#include "scanner_server.hpp"

int main(int argc, char** argv) {
  return pentestmcp::cli::scanner_server_main(argc, argv, "pentestmcp-nmap", pentestmcp::scan::kNmapTimeout,
                                              [](auto backend, auto timeout) {
                                                return pentestmcp::scan::make_nmap_server(backend, timeout);
                                              });
}
