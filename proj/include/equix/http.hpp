#pragma once

#include <string>

#include "equix/service.hpp"

namespace httplib {
class Server;
}

namespace equix {

// Registers the HTTP+JSON routes of `service` on `server`.
void register_routes(httplib::Server& server, Service& service);

// Blocks serving on host:port. Returns false when the port cannot be bound.
bool serve(Service& service, const std::string& host, int port);

}  // namespace equix
