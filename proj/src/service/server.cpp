#include "leafscan/service.hpp"

#include "httplib.h"

#include <exception>

namespace leafscan::service {
namespace {

void send(httplib::Response &res, const Reply &r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

} // namespace

void register_routes(httplib::Server &server, SessionStore &store) {
  server.set_payload_max_length(std::size_t{256} << 20);

  server.Get("/healthz", [](const httplib::Request &, httplib::Response &res) {
    send(res, Reply{200, Json{{"status", "ok"}}});
  });

  server.Post("/sessions", [&store](const httplib::Request &req, httplib::Response &res) {
    std::vector<std::uint8_t> bytes(req.body.begin(), req.body.end());
    send(res, store.create(std::move(bytes), req.get_header_value("Content-Type")));
  });

  server.Get(R"(/sessions/([0-9a-f]+))", [&store](const httplib::Request &req, httplib::Response &res) {
    send(res, store.get_session(req.matches[1]));
  });

  server.Get(R"(/sessions/([0-9a-f]+)/result)", [&store](const httplib::Request &req, httplib::Response &res) {
    send(res, store.get_result(req.matches[1]));
  });

  server.Patch(R"(/sessions/([0-9a-f]+)/config)", [&store](const httplib::Request &req, httplib::Response &res) {
    send(res, store.update_config(req.matches[1], req.body));
  });

  server.Post(R"(/sessions/([0-9a-f]+)/curves)", [&store](const httplib::Request &req, httplib::Response &res) {
    send(res, store.add_curve(req.matches[1], req.body));
  });

  server.Delete(R"(/sessions/([0-9a-f]+)/curves/(\d+))",
                [&store](const httplib::Request &req, httplib::Response &res) {
                  std::size_t index = 0;
                  try {
                    index = std::stoul(req.matches[2]);
                  } catch (const std::exception &) {
                    send(res, Reply{404, Json{{"error", "no such curve"}}});
                    return;
                  }
                  send(res, store.remove_curve(req.matches[1], index));
                });

  server.Get(R"(/sessions/([0-9a-f]+)/preview)", [&store](const httplib::Request &req, httplib::Response &res) {
    if (!req.has_param("layer")) {
      send(res, Reply{400, Json{{"error", "missing 'layer' parameter"}}});
      return;
    }
    Reply error;
    auto png = store.preview(req.matches[1], req.get_param_value("layer"), error);
    if (!png) {
      send(res, error);
      return;
    }
    res.status = 200;
    res.set_content(std::string(png->begin(), png->end()), "image/png");
  });

  server.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception &e) {
      what = e.what();
    } catch (...) {
    }
    send(res, Reply{500, Json{{"error", what}}});
  });
}

} // namespace leafscan::service
