#pragma once

// HTTP front end over a ProjectStore. Bodies are JSON; failures carry
// {"error": <name>, "message": ..., "offset": <int|null>}.
//
//   POST /pages                     {"html", "page_id"?} -> {"page_id", "tokens"}
//   GET  /pages/:id                 -> {"page_id", "html", "tokens", "labels"}
//   PUT  /pages/:id/labels          labels document -> {"page_id"}
//   POST /train                     {"pages": [...], "config"?} -> {"model_id"}
//   GET  /models/:id                model summary
//   POST /models/:id/extract?page=  -> extraction result
//   POST /eval                      {"model", "corpus" | "pages"} -> report

#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>

#include "fuzzwrap/store.hpp"

namespace fuzzwrap {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::FormatError:
    case ErrorCode::InvalidProfile: return 400;
    default: return 422;
  }
}

inline Json error_json(const Error& e) {
  Json j = {{"error", e.name()}, {"message", e.what()}, {"offset", nullptr}};
  if (e.offset()) j["offset"] = *e.offset();
  return j;
}

inline Json tokens_json(const std::vector<Token>& tokens) {
  Json out = Json::array();
  for (const auto& t : tokens)
    out.push_back({{"class", class_name(t.cls)},
                   {"span", Json::array({t.span.start, t.span.end})}});
  return out;
}

inline Json model_summary(const std::string& id, const WrapperModel& m) {
  Json seps = Json::array();
  for (const auto& [key, sep] : m.separators) {
    auto det = [](const DetectorModel& d) {
      return Json{{"n_instances", d.matrix.n_instances()},
                  {"c_min", d.calibration.c_min},
                  {"c_max", d.calibration.c_max},
                  {"c_moy", d.calibration.c_moy}};
    };
    seps.push_back({{"zone", key.zone.label()},
                    {"edge", edge_name(key.edge)},
                    {"left", det(sep.left)},
                    {"right", det(sep.right)}});
  }
  return {{"model_id", id},
          {"version", m.version},
          {"moyL", m.moyL.value},
          {"config", to_json(m.config)},
          {"separators", seps}};
}

// Fields present in `j` override the defaults.
inline WrapperConfig config_overrides(const Json& j) {
  Json full = to_json(WrapperConfig{});
  if (j.is_object()) full.update(j);
  return config_from_json(full);
}

class Service {
 public:
  using LogFn = std::function<void(const std::string&)>;

  explicit Service(ProjectStore& store, LogFn log = {})
      : store_(store), log_(std::move(log)) {
    routes();
  }

  httplib::Server& server() { return server_; }

  // Called while a train job holds its slot; lets tests observe a job in
  // flight.
  std::function<void()> on_train_started;

  Json train(const Json& body) {
    return detail::guarded("train request", [&] {
      std::vector<std::string> ids = body.at("pages").get<std::vector<std::string>>();
      const WrapperConfig cfg = config_overrides(body.value("config", Json::object()));
      std::vector<LabelledPage> pages;
      for (const auto& id : ids) pages.push_back(store_.labelled_page(id));

      std::string job = to_json(cfg).dump();
      for (const auto& p : pages) job += p.html + to_json(p.labels).dump();
      job = fnv1a_hex(job);
      {
        std::lock_guard lock(jobs_mu_);
        if (!jobs_.insert(job).second)
          throw Error(ErrorCode::Conflict, "a train job for this model is in flight");
      }
      struct Release {
        Service* s;
        std::string job;
        ~Release() {
          std::lock_guard lock(s->jobs_mu_);
          s->jobs_.erase(job);
        }
      } release{this, job};
      if (on_train_started) on_train_started();
      const std::string id = store_.add_model(fuzzwrap::train(pages, cfg));
      log("trained model " + id + " on " + std::to_string(pages.size()) + " pages");
      return Json{{"model_id", id}};
    });
  }

 private:
  void log(const std::string& msg) const {
    if (log_) log_(msg);
  }

  static void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  // Runs a handler, mapping library and JSON errors onto status codes.
  template <typename F>
  void handle(httplib::Response& res, F&& f) {
    try {
      reply(res, 200, f());
    } catch (const Error& e) {
      log(std::string("request failed: ") + e.what());
      reply(res, http_status(e.code()), error_json(e));
    } catch (const nlohmann::json::exception& e) {
      reply(res, 400, error_json(Error(ErrorCode::FormatError, e.what())));
    }
  }

  static Json body_json(const httplib::Request& req) {
    return detail::parse(req.body, "request body");
  }

  void routes() {
    server_.Post("/pages", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        Json b = body_json(req);
        const std::string html = detail::guarded("page", [&] {
          return b.at("html").get<std::string>();
        });
        const std::string id = store_.add_page(html, b.value("page_id", std::string{}));
        return Json{{"page_id", id}, {"tokens", tokens_json(tokenize(html))}};
      });
    });

    server_.Get("/pages/:id", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const std::string& id = req.path_params.at("id");
        const std::string html = store_.page(id);
        auto labels = store_.labels(id);
        return Json{{"page_id", id},
                    {"html", html},
                    {"tokens", tokens_json(tokenize(html))},
                    {"labels", labels ? to_json(*labels) : Json(nullptr)}};
      });
    });

    server_.Put("/pages/:id/labels",
                [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const std::string& id = req.path_params.at("id");
        Json b = body_json(req);
        if (!b.contains("page_id")) b["page_id"] = id;
        store_.put_labels(id, labels_from_json(b));
        return Json{{"page_id", id}};
      });
    });

    server_.Post("/train", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return train(body_json(req)); });
    });

    server_.Get("/models/:id", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const std::string& id = req.path_params.at("id");
        return model_summary(id, store_.model(id));
      });
    });

    server_.Post("/models/:id/extract",
                 [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const std::string& id = req.path_params.at("id");
        if (!req.has_param("page"))
          throw Error(ErrorCode::FormatError, "missing ?page= parameter");
        const std::string page_id = req.get_param_value("page");
        const WrapperModel model = store_.model(id);
        ExtractionResult r = extract(store_.page(page_id), model, page_id);
        store_.add_result(id, r);
        return to_json(r);
      });
    });

    server_.Post("/eval", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        Json b = body_json(req);
        return detail::guarded("eval request", [&] {
          const WrapperModel model = store_.model(b.at("model").get<std::string>());
          std::vector<LabelledPage> pages;
          std::string name;
          if (b.contains("corpus")) {
            name = b.at("corpus").get<std::string>();
            pages = store_.corpus(name).pages;
          } else {
            name = "pages";
            for (const auto& id : b.at("pages").get<std::vector<std::string>>())
              pages.push_back(store_.labelled_page(id));
          }
          return to_json(evaluate(pages, model, name));
        });
      });
    });
  }

  ProjectStore& store_;
  LogFn log_;
  httplib::Server server_;
  std::mutex jobs_mu_;
  std::set<std::string> jobs_;
};

}  // namespace fuzzwrap
