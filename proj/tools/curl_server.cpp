#include "scanner_server.hpp"

int main(int argc, char** argv) {
  return pentestmcp::cli::scanner_server_main(argc, argv, "pentestmcp-curl", pentestmcp::scan::kCurlTimeout,
                                              [](auto backend, auto timeout) {
                                                return pentestmcp::scan::make_curl_server(backend, timeout);
                                              });
}
