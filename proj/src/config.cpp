#include "cqbs/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "cqbs/constants.hpp"
#include "cqbs/errors.hpp"

namespace cqbs::config {

namespace {

using cd = std::complex<double>;

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream stream(text);
  while (std::getline(stream, part, delim)) parts.push_back(part);
  if (!text.empty() && text.back() == delim) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& token, const std::string& where) {
  std::string t = trim(token);
  if (t.empty()) throw ValidationError("empty number in " + where);
  char* end = nullptr;
  double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ValidationError("malformed number '" + t + "' in " + where);
  return value;
}

long long parse_int(const std::string& token, const std::string& where) {
  std::string t = trim(token);
  if (t.empty()) throw ValidationError("empty integer in " + where);
  char* end = nullptr;
  long long value = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ValidationError("malformed integer '" + t + "' in " + where);
  return value;
}

bool parse_bool(const std::string& token, const std::string& where) {
  std::string t = trim(token);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ValidationError("expected true or false in " + where);
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_complex(cd value) {
  char buffer[80];
  std::snprintf(buffer, sizeof(buffer), "%.17g%+.17gi", value.real(), value.imag());
  return buffer;
}

const char* convention_name(device::PhaseConvention convention) {
  return convention == device::PhaseConvention::plain ? "plain" : "angular";
}

device::PhaseConvention parse_convention(const std::string& token,
                                         const std::string& where) {
  std::string t = trim(token);
  if (t == "plain") return device::PhaseConvention::plain;
  if (t == "angular") return device::PhaseConvention::angular;
  throw ValidationError("unknown convention '" + t + "' in " + where);
}

const char* readout_name(ReadoutKind kind) {
  switch (kind) {
    case ReadoutKind::swap: return "swap";
    case ReadoutKind::qnd: return "qnd";
    default: return "none";
  }
}

void apply_device_key(device::DeviceParams& device, const std::string& key,
                      const std::string& value, const std::string& where) {
  if (key == "g_s") device.g_s = parse_double(value, where);
  else if (key == "g_bs") device.g_bs = parse_double(value, where);
  else if (key == "chi_ps") device.chi_ps = parse_double(value, where);
  else if (key == "xi_0") device.xi_0 = parse_double(value, where);
  else if (key == "convention") device.convention = parse_convention(value, where);
  else if (key == "kappa_s") device.kappa_s = parse_double(value, where);
  else if (key == "kappa_m") device.kappa_m = parse_double(value, where);
  else if (key == "omega_s") device.omega_s = parse_double(value, where);
  else if (key == "omega_m") device.omega_m = parse_double(value, where);
  else if (key == "omega_max") device.omega_max = parse_double(value, where);
  else if (key == "eta_readout") device.eta_readout = parse_double(value, where);
  else if (key == "f_prep") device.f_prep = parse_double(value, where);
  else if (key == "f_fock") device.f_fock = parse_double(value, where);
  else throw ValidationError("unknown device key in " + where);
}

void apply_input_key(ExperimentConfig& config, const std::string& key,
                     const std::string& value, const std::string& where) {
  if (key == "occupation") {
    config.occupation.clear();
    if (!trim(value).empty())
      for (const std::string& part : split(value, ','))
        config.occupation.push_back(int(parse_int(part, where)));
  } else if (key == "alpha") {
    config.alphas.clear();
    if (!trim(value).empty())
      for (const std::string& part : split(value, ','))
        config.alphas.push_back(parse_complex(part));
  } else if (key == "squeeze") {
    config.squeezes.clear();
    if (!trim(value).empty()) {
      for (const std::string& part : split(value, ';')) {
        std::vector<std::string> fields = split(part, ':');
        if (fields.size() != 3)
          throw ValidationError("squeeze entries need lower:r:phase in " + where);
        config.squeezes.push_back({int(parse_int(fields[0], where)),
                                   parse_double(fields[1], where),
                                   parse_double(fields[2], where)});
      }
    }
  } else if (key == "order") {
    std::string t = trim(value);
    if (t == "squeeze_first") config.displace_first = false;
    else if (t == "displace_first") config.displace_first = true;
    else throw ValidationError("order must be squeeze_first or displace_first in " + where);
  } else {
    throw ValidationError("unknown input key in " + where);
  }
}

void apply_readout_key(ExperimentConfig& config, const std::string& key,
                       const std::string& value, const std::string& where) {
  if (key == "model") {
    std::string t = trim(value);
    if (t == "none") config.readout = ReadoutKind::none;
    else if (t == "swap") config.readout = ReadoutKind::swap;
    else if (t == "qnd") config.readout = ReadoutKind::qnd;
    else throw ValidationError("unknown readout model '" + t + "' in " + where);
  } else if (key == "eta") {
    config.readout_eta = parse_double(value, where);
  } else if (key == "repetitions") {
    config.readout_repetitions = int(parse_int(value, where));
  } else if (key == "max_n_probe") {
    config.readout_max_n_probe = int(parse_int(value, where));
  } else if (key == "post_select") {
    config.post_select = parse_bool(value, where);
  } else {
    throw ValidationError("unknown readout key in " + where);
  }
}

void apply_top_key(ExperimentConfig& config, const std::string& key,
                   const std::string& value, const std::string& where) {
  if (key == "modes") config.modes = int(parse_int(value, where));
  else if (key == "photons") config.photons = int(parse_int(value, where));
  else if (key == "seed") config.seed = std::uint64_t(parse_int(value, where));
  else if (key == "cutoff") config.cutoff = int(parse_int(value, where));
  else if (key == "samples") config.samples = std::size_t(parse_int(value, where));
  else if (key == "depth_coefficient") config.depth_coefficient = parse_double(value, where);
  else if (key == "unitary_file") config.unitary_file = trim(value);
  else if (key == "loss") {
    config.loss_enabled = true;
    config.survival = parse_double(value, where);
  } else if (key == "loss_enabled") config.loss_enabled = parse_bool(value, where);
  else if (key == "survival") config.survival = parse_double(value, where);
  else throw ValidationError("unknown key in " + where);
}

}  // namespace

std::complex<double> parse_complex(const std::string& token) {
  std::string t = trim(token);
  if (t.empty()) throw ValidationError("empty complex value");
  if (t.back() != 'i') return {parse_double(t, "complex value"), 0.0};
  t.pop_back();
  // split at the last sign that does not follow an exponent marker
  std::size_t cut = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  if (cut == std::string::npos) {
    if (t.empty() || t == "+") return {0.0, 1.0};
    if (t == "-") return {0.0, -1.0};
    return {0.0, parse_double(t, "complex value")};
  }
  std::string imag = t.substr(cut);
  double im = (imag == "+") ? 1.0 : (imag == "-") ? -1.0
                                                  : parse_double(imag, "complex value");
  return {parse_double(t.substr(0, cut), "complex value"), im};
}

void apply_config_text(ExperimentConfig& config, const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    std::string where = "config line " + std::to_string(number);
    if (t.front() == '[') {
      if (t.back() != ']') throw ValidationError("unterminated section in " + where);
      section = trim(t.substr(1, t.size() - 2));
      if (section != "device" && section != "input" && section != "readout")
        throw ValidationError("unknown section '" + section + "' in " + where);
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected key=value in " + where);
    std::string key = trim(t.substr(0, eq));
    std::string value = t.substr(eq + 1);
    if (section == "device") apply_device_key(config.device, key, value, where);
    else if (section == "input") apply_input_key(config, key, value, where);
    else if (section == "readout") apply_readout_key(config, key, value, where);
    else apply_top_key(config, key, value, where);
  }
}

std::string canonical_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "modes=" << config.modes << "\n";
  out << "photons=" << config.photons << "\n";
  out << "seed=" << config.seed << "\n";
  out << "cutoff=" << config.cutoff << "\n";
  out << "samples=" << config.samples << "\n";
  out << "depth_coefficient=" << format_double(config.depth_coefficient) << "\n";
  out << "unitary_file=" << config.unitary_file << "\n";
  out << "loss_enabled=" << (config.loss_enabled ? "true" : "false") << "\n";
  out << "survival=" << format_double(config.survival) << "\n";
  const device::DeviceParams& d = config.device;
  out << "[device]\n";
  out << "g_s=" << format_double(d.g_s) << "\n";
  out << "g_bs=" << format_double(d.g_bs) << "\n";
  out << "chi_ps=" << format_double(d.chi_ps) << "\n";
  out << "xi_0=" << format_double(d.xi_0) << "\n";
  out << "convention=" << convention_name(d.convention) << "\n";
  out << "kappa_s=" << format_double(d.kappa_s) << "\n";
  out << "kappa_m=" << format_double(d.kappa_m) << "\n";
  out << "omega_s=" << format_double(d.omega_s) << "\n";
  out << "omega_m=" << format_double(d.omega_m) << "\n";
  out << "omega_max=" << format_double(d.omega_max) << "\n";
  out << "eta_readout=" << format_double(d.eta_readout) << "\n";
  out << "f_prep=" << format_double(d.f_prep) << "\n";
  out << "f_fock=" << format_double(d.f_fock) << "\n";
  out << "[input]\n";
  out << "occupation=";
  for (std::size_t i = 0; i < config.occupation.size(); ++i)
    out << (i ? "," : "") << config.occupation[i];
  out << "\n";
  out << "alpha=";
  for (std::size_t i = 0; i < config.alphas.size(); ++i)
    out << (i ? "," : "") << format_complex(config.alphas[i]);
  out << "\n";
  out << "squeeze=";
  for (std::size_t i = 0; i < config.squeezes.size(); ++i)
    out << (i ? ";" : "") << config.squeezes[i].lower_mode << ":"
        << format_double(config.squeezes[i].r) << ":"
        << format_double(config.squeezes[i].phase);
  out << "\n";
  out << "order=" << (config.displace_first ? "displace_first" : "squeeze_first") << "\n";
  out << "[readout]\n";
  out << "model=" << readout_name(config.readout) << "\n";
  out << "eta=" << format_double(config.readout_eta) << "\n";
  out << "repetitions=" << config.readout_repetitions << "\n";
  out << "max_n_probe=" << config.readout_max_n_probe << "\n";
  out << "post_select=" << (config.post_select ? "true" : "false") << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : canonical_text(config)) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string header_lines(const ExperimentConfig& config) {
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  std::ostringstream out;
  out << "# artifact " << constants::artifact_version << "\n";
  out << "# config-hash " << hex << "\n";
  out << "# seed " << config.seed << "\n";
  return out.str();
}

fock::Occupation default_occupation(const ExperimentConfig& config) {
  if (!config.occupation.empty()) {
    if (int(config.occupation.size()) != config.modes)
      throw ValidationError("occupation length must match the mode count");
    for (int n : config.occupation)
      if (n < 0) throw ValidationError("occupation entries must be non-negative");
    return config.occupation;
  }
  if (config.photons < 0) throw ValidationError("photon count must be non-negative");
  if (config.photons > config.modes)
    throw ValidationError("default input needs at least as many modes as photons");
  fock::Occupation occupation(std::size_t(config.modes), 0);
  for (int i = 0; i < config.photons; ++i) occupation[std::size_t(i)] = 1;
  return occupation;
}

gaussian::GaussianPrep gaussian_input(const ExperimentConfig& config) {
  gaussian::GaussianPrep prep;
  if (config.alphas.empty()) {
    prep.displacements.assign(std::size_t(config.modes), cd(0.0, 0.0));
  } else {
    if (int(config.alphas.size()) != config.modes)
      throw ValidationError("alpha list length must match the mode count");
    prep.displacements = config.alphas;
  }
  prep.squeezes = config.squeezes;
  prep.displace_first = config.displace_first;
  return prep;
}

sampler::ReadoutModel readout_model(const ExperimentConfig& config) {
  if (config.readout == ReadoutKind::swap)
    return sampler::SwapPhotodetector{config.post_select};
  if (config.readout == ReadoutKind::qnd)
    return sampler::QndCounter{config.readout_eta, config.readout_repetitions,
                               config.readout_max_n_probe};
  throw ValidationError("no readout model configured");
}

std::string serialize_elements(const interferometer::ElementList& elements) {
  std::ostringstream out;
  out << "# element-list v1\n# kind\ttarget\tvalue\n";
  for (const interferometer::Element& element : elements) {
    if (const auto* bs = std::get_if<interferometer::BeamSplitter>(&element))
      out << "bs\t" << bs->lower_mode << "\t" << format_double(bs->angle) << "\n";
    else
      out << "ps\t" << std::get<interferometer::PhaseShifter>(element).mode << "\t"
          << format_double(std::get<interferometer::PhaseShifter>(element).phase) << "\n";
  }
  return out.str();
}

interferometer::ElementList parse_elements(const std::string& text) {
  interferometer::ElementList elements;
  std::istringstream stream(text);
  std::string line;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::string where = "element line " + std::to_string(number);
    std::vector<std::string> fields = split(t, '\t');
    if (fields.size() != 3)
      throw ValidationError("expected kind, target, value in " + where);
    int target = int(parse_int(fields[1], where));
    double value = parse_double(fields[2], where);
    if (fields[0] == "bs") elements.push_back(interferometer::BeamSplitter{target, value});
    else if (fields[0] == "ps")
      elements.push_back(interferometer::PhaseShifter{target, value});
    else throw ValidationError("unknown element kind '" + fields[0] + "' in " + where);
  }
  return elements;
}

std::string serialize_unitary(const Eigen::MatrixXcd& unitary) {
  if (unitary.rows() != unitary.cols())
    throw ValidationError("unitary serialization needs a square matrix");
  std::ostringstream out;
  out << "# unitary v1\nmodes\t" << unitary.rows() << "\n";
  for (Eigen::Index r = 0; r < unitary.rows(); ++r) {
    for (Eigen::Index c = 0; c < unitary.cols(); ++c)
      out << (c ? "\t" : "") << format_complex(unitary(r, c));
    out << "\n";
  }
  return out.str();
}

Eigen::MatrixXcd parse_unitary(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  int modes = -1;
  Eigen::MatrixXcd matrix;
  Eigen::Index row = 0;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::string where = "unitary line " + std::to_string(number);
    std::vector<std::string> fields = split(t, '\t');
    if (modes < 0) {
      if (fields.size() != 2 || fields[0] != "modes")
        throw ValidationError("expected a 'modes\t<M>' line in " + where);
      modes = int(parse_int(fields[1], where));
      if (modes < 1) throw ValidationError("mode count must be positive in " + where);
      matrix.resize(modes, modes);
      continue;
    }
    if (row >= modes) throw ValidationError("extra matrix row in " + where);
    if (int(fields.size()) != modes)
      throw ValidationError("expected " + std::to_string(modes) + " entries in " + where);
    for (int c = 0; c < modes; ++c) matrix(row, c) = parse_complex(fields[std::size_t(c)]);
    ++row;
  }
  if (modes < 0) throw ValidationError("unitary file has no 'modes' line");
  if (row != modes) throw ValidationError("unitary file is missing matrix rows");
  return matrix;
}

std::string serialize_distribution(const sampler::OutputDistribution& distribution) {
  std::ostringstream out;
  out << "# pattern\tprobability\n";
  char buffer[40];
  for (const auto& [pattern, p] : distribution.entries) {
    for (std::size_t i = 0; i < pattern.size(); ++i)
      out << (i ? "," : "") << pattern[i];
    std::snprintf(buffer, sizeof(buffer), "%.12g", p);
    out << "\t" << buffer << "\n";
  }
  return out.str();
}

}  // namespace cqbs::config
