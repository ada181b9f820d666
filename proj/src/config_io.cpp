#include "diwe/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace diwe {

using nlohmann::json;

DiweConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    DiweConfig config;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "phi_grid")
                config.phi_grid = value.get<std::vector<double>>();
            else if (key == "voting_size")
                config.voting_size = value.get<int>();
            else if (key == "k")
                config.k = value.get<int>();
            else if (key == "max_buffer")
                config.max_buffer = value.get<std::size_t>();
            else if (key == "alpha")
                config.alpha = value.get<double>();
            else if (key == "select_every")
                config.select_every = value.get<int>();
            else
                throw ConfigError("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value type: ") + e.what());
    }
    config.validate();
    return config;
}

DiweConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

std::string config_to_json(const DiweConfig& config) {
    json j{{"phi_grid", config.phi_grid},
           {"voting_size", config.voting_size},
           {"k", config.k},
           {"max_buffer", config.max_buffer},
           {"alpha", config.alpha},
           {"select_every", config.select_every}};
    return j.dump(2);
}

}  // namespace diwe
