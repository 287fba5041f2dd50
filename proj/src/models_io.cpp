#include "autoint/dqc.hpp"
#include "autoint/errors.hpp"
#include "autoint/mlp.hpp"
#include "autoint/model.hpp"
#include "autoint/pinning.hpp"

namespace autoint {

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    if (!j.contains("kind")) throw ConfigError("model file: missing 'kind'");
    if (j.value("format_version", 0) != 1) throw ConfigError("model file: unsupported format version");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlp") return std::make_unique<MlpModel>(MlpModel::from_json(j));
    if (kind == "dqc") return std::make_unique<DqcModel>(DqcModel::from_json(j));
    if (kind == "pinned") {
        PinConditions c;
        c.t0 = j.at("t0").get<double>();
        c.var = j.at("var").get<int>();
        const auto& values = j.at("values");
        if (values.size() > 3) throw UnsupportedError("model file: pin above order 2");
        for (std::size_t k = 0; k < values.size(); ++k)
            if (!values[k].is_null()) c.values[k] = values[k].get<double>();
        return std::make_unique<PinnedModel>(model_from_json(j.at("inner")), c,
                                             j.at("alpha").get<double>());
    }
    if (kind == "expr")
        throw UnsupportedError("model file: expression models are rebuilt from code, not files");
    throw ConfigError("model file: unknown kind '" + kind + "'");
}

} // namespace autoint
