#include <httplib.h>

#include <iostream>

#include "umbra/service.h"

int main() {
  try {
    umbra::SessionService service(umbra::ConfigFromEnv());
    httplib::Server server;
    umbra::MountRoutes(server, service);
    std::cerr << "listening on 0.0.0.0:" << service.config().port << "\n";
    if (!server.listen("0.0.0.0", service.config().port)) {
      std::cerr << "cannot bind port " << service.config().port << "\n";
      return 1;
    }
  } catch (const umbra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.IsIo() ? 1 : 2;
  }
  return 0;
}
