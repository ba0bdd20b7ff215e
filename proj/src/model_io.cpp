#include "ptse/estimator.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace ptse {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "ptse-model";
constexpr int kVersion = 1;

json to_json(const Eigen::VectorXd& v)
{
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

json to_json(const Eigen::MatrixXd& m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& arr, const char* field)
{
  if (!arr.is_array() || arr.empty()) {
    throw MalformedDocument(std::string("model field '") + field + "' must be a nonempty array");
  }
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const json& x : arr) {
    if (!x.is_number()) {
      throw MalformedDocument(std::string("model field '") + field + "' has a non-numeric entry");
    }
    v[i++] = x.get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& rows, const char* field)
{
  if (!rows.is_array() || rows.empty()) {
    throw MalformedDocument(std::string("model field '") + field + "' must be a nonempty array");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m;
  Eigen::Index i = 0;
  for (const json& row : rows) {
    const Eigen::VectorXd r = vector_from(row, field);
    if (i == 0) {
      m.resize(n, r.size());
    } else if (r.size() != m.cols()) {
      throw MalformedDocument(std::string("model field '") + field + "' has ragged rows");
    }
    m.row(i++) = r.transpose();
  }
  return m;
}

const json& require(const json& doc, const char* field)
{
  const auto it = doc.find(field);
  if (it == doc.end()) {
    throw MalformedDocument(std::string("model document lacks field '") + field + "'");
  }
  return *it;
}

} // namespace

std::string serialize(const EnsembleModel& model)
{
  json doc;
  doc["schema"] = kSchema;
  doc["version"] = kVersion;
  doc["q"] = model.q;
  doc["member_names"] = model.member_names;
  doc["transition"] = to_json(model.transition.entries());
  doc["initial"] = to_json(model.initial.probs());
  doc["stationary"] = to_json(model.stationary.probs());
  doc["converged"] = model.converged;
  doc["iterations"] = model.iterations;
  doc["floored_likelihoods"] = model.floored_likelihoods;
  doc["fit_trace"] = model.fit_trace;
  json emissions = json::array();
  for (const MqeEmission& e : model.emissions) {
    json je;
    je["residuals"] = to_json(e.residuals);
    je["gamma_weights"] = to_json(e.gamma_weights);
    je["bandwidth"] = e.bandwidth;
    je["w_neg"] = e.w_neg;
    je["w_pos"] = e.w_pos;
    je["q"] = e.q;
    je["constrained"] = e.constrained;
    emissions.push_back(std::move(je));
  }
  doc["emissions"] = std::move(emissions);
  return doc.dump(2) + "\n";
}

EnsembleModel deserialize(const std::string& document)
{
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& ex) {
    throw MalformedDocument(std::string("model document is not valid JSON: ") + ex.what());
  }
  if (!doc.is_object()) {
    throw MalformedDocument("model document must be a JSON object");
  }

  const json& schema = require(doc, "schema");
  const json& version = require(doc, "version");
  if (!schema.is_string() || schema.get<std::string>() != kSchema) {
    throw SchemaVersionMismatch("unknown model schema");
  }
  if (!version.is_number_integer() || version.get<int>() != kVersion) {
    throw SchemaVersionMismatch("unsupported model schema version");
  }

  try {
    const double q = require(doc, "q").get<double>();
    const std::vector<std::string> member_names =
      require(doc, "member_names").get<std::vector<std::string>>();
    TransitionMatrix transition(matrix_from(require(doc, "transition"), "transition"));
    StateDistribution initial(vector_from(require(doc, "initial"), "initial"));
    StateDistribution stationary(vector_from(require(doc, "stationary"), "stationary"));

    const json& emissions_doc = require(doc, "emissions");
    if (!emissions_doc.is_array() || emissions_doc.size() != member_names.size()) {
      throw MalformedDocument("emission count does not match the member list");
    }
    const Eigen::Index k = static_cast<Eigen::Index>(member_names.size());
    if (transition.size() != k || initial.size() != k || stationary.size() != k) {
      throw MalformedDocument("matrix/vector sizes do not match the member list");
    }

    std::vector<MqeEmission> emissions;
    emissions.reserve(member_names.size());
    for (const json& je : emissions_doc) {
      SideConstants side{ require(je, "w_neg").get<double>(), require(je, "w_pos").get<double>(),
                          require(je, "constrained").get<bool>() };
      MqeEmission e(vector_from(require(je, "residuals"), "residuals"),
                    vector_from(require(je, "gamma_weights"), "gamma_weights"),
                    require(je, "bandwidth").get<double>(), side, require(je, "q").get<double>());
      if (e.q != q) {
        throw MalformedDocument("emission level disagrees with the model level");
      }
      emissions.push_back(std::move(e));
    }

    const double residual =
      ((stationary.probs().transpose() * transition.entries()).transpose() - stationary.probs())
        .cwiseAbs()
        .maxCoeff();
    if (residual > 1e-9) {
      throw MalformedDocument("stored stationary distribution is not stationary");
    }

    EnsembleModel model{ std::move(transition),
                         std::move(initial),
                         std::move(stationary),
                         std::move(emissions),
                         q,
                         member_names,
                         require(doc, "fit_trace").get<std::vector<double>>(),
                         require(doc, "converged").get<bool>(),
                         require(doc, "iterations").get<int>(),
                         require(doc, "floored_likelihoods").get<long>() };
    return model;
  } catch (const json::exception& ex) {
    throw MalformedDocument(std::string("model document has a bad field: ") + ex.what());
  } catch (const InvalidArgument& ex) {
    throw MalformedDocument(std::string("model document violates an invariant: ") + ex.what());
  }
}

} // namespace ptse
