#include "equix/http.hpp"

#include <charconv>
#include <httplib.h>

namespace equix {

namespace {

void send(httplib::Response& res, const ServiceResponse& response) {
  res.status = response.status;
  res.set_content(response.body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send(res, {status, {{"code", status}, {"message", message}, {"diagnostics", nlohmann::json::array()}}});
}

// Unsigned query parameter, `fallback` when absent.
std::optional<std::size_t> parameter(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  std::string text = req.get_param_value(key);
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

void register_routes(httplib::Server& server, Service& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.Get("/catalogs", [&](const httplib::Request&, httplib::Response& res) { send(res, service.list_catalogs()); });
  server.Get(R"(/catalogs/([^/]+)/dtd)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.catalog_dtd(req.matches[1]));
  });
  server.Post(R"(/catalogs/([^/]+)/query)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.query_catalog(req.matches[1], req.body));
  });
  server.Post(R"(/results/([^/]+)/query)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.query_result(req.matches[1], req.body));
  });
  server.Get(R"(/results/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_result(req.matches[1]));
  });
  server.Get(R"(/results/([^/]+)/docs)", [&](const httplib::Request& req, httplib::Response& res) {
    auto page = parameter(req, "page", 0);
    auto size = parameter(req, "size", Service::default_page_size);
    if (!page || !size) return send_error(res, 400, "page and size must be non-negative integers");
    send(res, service.result_documents(req.matches[1], *page, *size));
  });
  server.Get(R"(/results/([^/]+)/dtd)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.result_dtd(req.matches[1]));
  });
  server.Get("/ontologies", [&](const httplib::Request&, httplib::Response& res) {
    send(res, service.list_ontologies());
  });
  server.Post("/reload", [&](const httplib::Request&, httplib::Response& res) { send(res, service.reload()); });

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, message);
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, res.status, res.status == 404 ? "no such endpoint" : "request failed");
  });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  // The library default adds SO_REUSEPORT, which lets a second server share a
  // port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  register_routes(server, service);
  return server.listen(host, port);
}

}  // namespace equix
