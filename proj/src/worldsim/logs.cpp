#include "beliefgraph/worldsim/logs.hpp"

#include <sstream>

namespace beliefgraph::worldsim {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json box_to_json(const Box& b) { return ordered_json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be [x1, y1, x2, y2]");
    Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!b.valid()) throw std::invalid_argument("box corners out of order");
    return b;
}

ordered_json point_to_json(const Point2& p) { return ordered_json::array({p.x, p.y}); }

Point2 point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

ordered_json scores_to_json(const AttributeScores& s) {
    return ordered_json{{"color", s.color}, {"material", s.material}, {"category", s.category}, {"empty", s.empty}};
}

AttributeScores scores_from_json(const json& j) {
    AttributeScores s;
    s.color = j.at("color").get<std::vector<double>>();
    s.material = j.at("material").get<std::vector<double>>();
    s.category = j.at("category").get<std::vector<double>>();
    s.empty = j.at("empty").get<double>();
    if (s.color.size() != kColorNames.size() || s.material.size() != kMaterialNames.size() ||
        s.category.size() != kCategoryNames.size()) {
        throw std::invalid_argument("attribute score table has the wrong shape");
    }
    return s;
}

ordered_json pairs_to_json(const std::vector<std::pair<int, Box>>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& [id, b] : v) out.push_back({id, box_to_json(b)});
    return out;
}

std::vector<std::pair<int, Box>> pairs_from_json(const json& j) {
    std::vector<std::pair<int, Box>> out;
    for (const auto& e : j) out.emplace_back(e.at(0).get<int>(), box_from_json(e.at(1)));
    return out;
}

template <typename Parse>
auto parse_record(std::size_t line_no, std::string_view line, Parse&& parse) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw LogFormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
        return parse(j);
    } catch (const LogFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw LogFormatError(line_no, e.what());
    }
}

}  // namespace

ordered_json observation_to_json(const FrameObservation& f) {
    ordered_json dets = ordered_json::array();
    for (const auto& d : f.detections) {
        dets.push_back({{"box", box_to_json(d.box)},
                        {"score", d.score},
                        {"feature", d.feature},
                        {"attributes", scores_to_json(d.attributes)}});
    }
    ordered_json agents = ordered_json::array();
    for (const auto& a : f.agents) {
        ordered_json r{{"keypoints",
                        {{"foot", point_to_json(a.keypoints.foot)},
                         {"hand", point_to_json(a.keypoints.hand)},
                         {"shoulder", point_to_json(a.keypoints.shoulder)}}},
                       {"box", box_to_json(a.box)},
                       {"score", a.score},
                       {"feature", a.feature}};
        if (a.reach) r["reach"] = point_to_json(*a.reach);
        agents.push_back(std::move(r));
    }
    return ordered_json{{"time", f.time}, {"camera", f.camera}, {"detections", dets}, {"agents", agents}};
}

FrameObservation observation_from_json(const json& j) {
    FrameObservation f;
    f.time = j.at("time").get<int>();
    f.camera = j.at("camera").get<int>();
    for (const auto& d : j.at("detections")) {
        Detection det;
        det.box = box_from_json(d.at("box"));
        det.score = d.at("score").get<double>();
        det.feature = d.at("feature").get<std::vector<double>>();
        det.attributes = scores_from_json(d.at("attributes"));
        if (det.score < 0.0 || det.score > 1.0) throw std::invalid_argument("detection score outside [0, 1]");
        f.detections.push_back(std::move(det));
    }
    for (const auto& a : j.at("agents")) {
        AgentObservation ag;
        const auto& kp = a.at("keypoints");
        ag.keypoints = {point_from_json(kp.at("foot")), point_from_json(kp.at("hand")), point_from_json(kp.at("shoulder"))};
        ag.box = box_from_json(a.at("box"));
        ag.score = a.at("score").get<double>();
        ag.feature = a.at("feature").get<std::vector<double>>();
        if (a.contains("reach")) ag.reach = point_from_json(a.at("reach"));
        f.agents.push_back(std::move(ag));
    }
    return f;
}

std::string dump_observations(const ObservationLog& log) {
    std::string out;
    for (const auto& f : log) {
        out += observation_to_json(f).dump();
        out += '\n';
    }
    return out;
}

ObservationLog load_observations(std::string_view text) {
    ObservationLog log;
    for_each_line(text, [&](std::size_t n, std::string_view line) {
        log.push_back(parse_record(n, line, observation_from_json));
        if (log.size() > 1) {
            const auto& a = log[log.size() - 2];
            const auto& b = log.back();
            if (std::pair(b.time, b.camera) <= std::pair(a.time, a.camera)) {
                throw LogFormatError(n, "records out of (time, camera) order");
            }
        }
    });
    return log;
}

std::string dump_ground_truth(const GroundTruthLog& log) {
    ordered_json objects = ordered_json::array();
    for (const auto& o : log.objects) {
        objects.push_back({{"id", o.id},
                           {"attributes", attributes_to_json(o.attributes)},
                           {"position", point_to_json(o.position)},
                           {"width", o.width},
                           {"aspect", o.aspect},
                           {"empty", o.empty}});
    }
    ordered_json interactions = ordered_json::array();
    for (const auto& r : log.interactions) {
        interactions.push_back({{"object", r.object}, {"time", r.time}, {"kind", to_string(r.kind)}, {"actor", r.actor}});
    }
    ordered_json reaches = ordered_json::array();
    for (const auto& r : log.reaches) {
        reaches.push_back({{"agent", r.agent}, {"time", r.time}, {"last_time", r.last_time}, {"target", r.target}});
    }
    ordered_json header{{"kind", "header"},        {"scenario", log.scenario},   {"horizon", log.horizon},
                        {"cameras", log.cameras},  {"objects", objects},         {"agents", log.agents},
                        {"interactions", interactions}, {"reaches", reaches}};
    std::string out = header.dump() + "\n";
    for (const auto& f : log.frames) {
        ordered_json objs = ordered_json::array();
        for (const auto& o : f.objects) {
            objs.push_back({{"id", o.id},
                            {"position", point_to_json(o.position)},
                            {"holder", o.holder},
                            {"empty", o.empty},
                            {"hidden", o.hidden},
                            {"room", o.room}});
        }
        ordered_json agents = ordered_json::array();
        for (const auto& a : f.agents) {
            ordered_json r{{"id", a.id},
                           {"present", a.present},
                           {"position", point_to_json(a.position)},
                           {"hand", point_to_json(a.hand)},
                           {"room", a.room}};
            if (a.reach) r["reach"] = point_to_json(*a.reach);
            agents.push_back(std::move(r));
        }
        ordered_json views = ordered_json::array();
        for (const auto& v : f.views) {
            views.push_back({{"camera", v.camera},
                             {"objects", pairs_to_json(v.objects)},
                             {"agents", pairs_to_json(v.agents)},
                             {"detection_sources", v.detection_sources},
                             {"agent_sources", v.agent_sources}});
        }
        ordered_json rec{{"kind", "frame"}, {"time", f.time}, {"objects", objs}, {"agents", agents}, {"views", views}};
        out += rec.dump();
        out += '\n';
    }
    return out;
}

GroundTruthLog load_ground_truth(std::string_view text) {
    GroundTruthLog log;
    bool have_header = false;
    for_each_line(text, [&](std::size_t n, std::string_view line) {
        parse_record(n, line, [&](const json& j) {
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "header") {
                if (have_header) throw std::invalid_argument("duplicate header record");
                have_header = true;
                log.scenario = j.at("scenario").get<std::string>();
                log.horizon = j.at("horizon").get<int>();
                log.cameras = j.at("cameras").get<std::vector<int>>();
                log.agents = j.at("agents").get<std::vector<int>>();
                for (const auto& o : j.at("objects")) {
                    ObjectSpec s;
                    s.id = o.at("id").get<int>();
                    s.attributes = attributes_from_json(o.at("attributes"));
                    s.position = point_from_json(o.at("position"));
                    s.width = o.at("width").get<double>();
                    s.aspect = o.at("aspect").get<double>();
                    s.empty = o.at("empty").get<bool>();
                    log.objects.push_back(s);
                }
                for (const auto& r : j.at("interactions")) {
                    log.interactions.push_back({r.at("object").get<int>(), r.at("time").get<int>(),
                                                event_kind_from_string(r.at("kind").get<std::string>()),
                                                r.at("actor").get<int>()});
                }
                for (const auto& r : j.at("reaches")) {
                    log.reaches.push_back({r.at("agent").get<int>(), r.at("time").get<int>(),
                                           r.at("last_time").get<int>(), r.at("target").get<int>()});
                }
                return 0;
            }
            if (kind != "frame") throw std::invalid_argument("unknown record kind '" + kind + "'");
            if (!have_header) throw std::invalid_argument("frame record before header");
            FrameTruth f;
            f.time = j.at("time").get<int>();
            if (f.time != static_cast<int>(log.frames.size()) + 1) {
                throw std::invalid_argument("expected frame " + std::to_string(log.frames.size() + 1) + ", got " +
                                            std::to_string(f.time));
            }
            for (const auto& o : j.at("objects")) {
                f.objects.push_back({o.at("id").get<int>(), point_from_json(o.at("position")), o.at("holder").get<int>(),
                                     o.at("empty").get<bool>(), o.at("hidden").get<bool>(), o.at("room").get<int>()});
            }
            for (const auto& a : j.at("agents")) {
                AgentTruth at;
                at.id = a.at("id").get<int>();
                at.present = a.at("present").get<bool>();
                at.position = point_from_json(a.at("position"));
                at.hand = point_from_json(a.at("hand"));
                at.room = a.at("room").get<int>();
                if (a.contains("reach")) at.reach = point_from_json(a.at("reach"));
                f.agents.push_back(at);
            }
            for (const auto& v : j.at("views")) {
                ViewTruth vt;
                vt.camera = v.at("camera").get<int>();
                vt.objects = pairs_from_json(v.at("objects"));
                vt.agents = pairs_from_json(v.at("agents"));
                vt.detection_sources = v.at("detection_sources").get<std::vector<int>>();
                vt.agent_sources = v.at("agent_sources").get<std::vector<int>>();
                f.views.push_back(std::move(vt));
            }
            log.frames.push_back(std::move(f));
            return 0;
        });
    });
    if (!have_header) throw LogFormatError(0, "ground-truth log has no header record");
    if (static_cast<int>(log.frames.size()) != log.horizon) {
        throw LogFormatError(0, "ground-truth log has " + std::to_string(log.frames.size()) + " frames, header says " +
                                    std::to_string(log.horizon));
    }
    return log;
}

}  // namespace beliefgraph::worldsim
