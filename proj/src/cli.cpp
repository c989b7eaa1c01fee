#include "sgft/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "sgft/codec.hpp"
#include "sgft/error.hpp"
#include "sgft/eval.hpp"
#include "sgft/markov_model.hpp"
#include "sgft/pgm.hpp"
#include "sgft/signed_graph.hpp"
#include "sgft/spectral.hpp"

namespace sgft {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "+inf" || lower == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + s);
  }
  if (used != s.size()) throw UsageError("not a number: " + s);
  return v;
}

// `N k s_1 ... s_N`, variances with s_1 possibly `inf`.
MarkovModel1D parse_line_spec(const std::vector<std::string>& spec) {
  if (spec.size() < 2) throw UsageError("--line expects N k sigma_1^2 ... sigma_N^2");
  const double n = parse_number(spec[0]);
  const double k = parse_number(spec[1]);
  if (n < 2 || n != std::floor(n) || k != std::floor(k)) {
    throw UsageError("--line: N and k must be integers, N >= 2");
  }
  if (spec.size() != 2 + static_cast<std::size_t>(n)) {
    throw UsageError("--line: expected " + std::to_string(static_cast<int>(n)) +
                     " variances, got " + std::to_string(spec.size() - 2));
  }
  std::vector<double> sigma;
  for (std::size_t i = 2; i < spec.size(); ++i) sigma.push_back(parse_number(spec[i]));
  const bool flag = std::isinf(sigma[0]);
  return MarkovModel1D::create(std::move(sigma), static_cast<int>(k), flag);
}

// Positive-weight counterpart: magnitudes of all edges, no loops.
SignedGraph positive_variant(const SignedGraph& g) {
  SignedGraph out(g.size());
  for (const Edge& e : g.edges()) out.add_edge(e.i, e.j, std::abs(e.weight));
  return out;
}

SignedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_graph(in);
}

void print_matrix(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << std::setw(12) << m(r, c);
    }
    out << '\n';
  }
}

void print_basis(std::ostream& out, const Basis& b) {
  out << "eigenvalues\n";
  for (std::size_t i = 0; i < b.order(); ++i) {
    out << (i + 1) << ' ' << std::setw(16) << b.eigenvalues[i] << '\n';
  }
  out << "eigenvectors\nnode";
  for (std::size_t i = 0; i < b.order(); ++i) out << std::setw(14) << ("v" + std::to_string(i + 1));
  out << '\n';
  for (std::size_t r = 0; r < b.order(); ++r) {
    out << std::setw(4) << (r + 1);
    for (std::size_t c = 0; c < b.order(); ++c) out << ' ' << std::setw(13) << b.vectors(r, c);
    out << '\n';
  }
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_method(item));
    } catch (const Error&) {
      throw UsageError("unknown method: " + item);
    }
  }
  if (out.empty()) throw UsageError("--methods is empty");
  return out;
}

std::string format_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signed graph Fourier transform toolkit and depth codec", "sgft"};
  app.require_subcommand(1);

  // encode
  auto* enc = app.add_subcommand("encode", "Encode an 8-bit PGM depth map");
  std::string enc_in, enc_out, enc_recon, enc_method = "sgft";
  int enc_qp = 32, enc_threshold = 30;
  std::optional<double> enc_w;
  enc->add_option("input", enc_in, "Input PGM")->required();
  enc->add_option("output", enc_out, "Output bitstream")->required();
  enc->add_option("--qp", enc_qp, "Quantization parameter 0..51");
  enc->add_option("--w", enc_w, "Graph weight (default 0.5 for sgft, 0.1 for wgft)");
  enc->add_option("--threshold", enc_threshold, "Contour threshold 1..255");
  enc->add_option("--method", enc_method, "sgft, wgft or dct");
  enc->add_option("--recon", enc_recon, "Also write the encoder reconstruction");

  // decode
  auto* dec = app.add_subcommand("decode", "Decode a bitstream to PGM");
  std::string dec_in, dec_out;
  dec->add_option("input", dec_in, "Input bitstream")->required();
  dec->add_option("output", dec_out, "Output PGM")->required();

  // rd-sweep
  auto* rd = app.add_subcommand("rd-sweep", "Rate-distortion sweep to CSV");
  std::string rd_in, rd_methods = "sgft,wgft,dct", rd_csv;
  std::vector<int> rd_qps;
  double rd_w = 0.5, rd_w_pos = 0.1;
  int rd_threshold = 30;
  bool rd_search = false;
  rd->add_option("input", rd_in, "Input PGM")->required();
  rd->add_option("--methods", rd_methods, "Comma-separated methods");
  rd->add_option("--qps", rd_qps, "QP list (default per method)")->delimiter(',');
  rd->add_option("--csv", rd_csv, "Output CSV (stdout when omitted)");
  rd->add_option("--w", rd_w, "SGFT negative-edge weight");
  rd->add_option("--w-pos", rd_w_pos, "WGFT contour weight");
  rd->add_option("--threshold", rd_threshold, "Contour threshold");
  rd->add_flag("--search-w", rd_search, "Pick the SGFT weight by grid search at qp 32");

  // basis-dump
  auto* bd = app.add_subcommand("basis-dump", "Print a graph's eigenvalues and eigenvectors");
  std::string bd_graph, bd_format = "text";
  std::vector<std::string> bd_line;
  bool bd_wgft = false;
  auto* bd_graph_opt = bd->add_option("--graph", bd_graph, "Graph text file");
  auto* bd_line_opt =
      bd->add_option("--line", bd_line, "N k sigma_1^2 ... sigma_N^2 (sigma_1^2 may be inf)")
          ->expected(2, CLI::detail::expected_max_vector_size)
          ->allow_extra_args();
  bd_graph_opt->excludes(bd_line_opt);
  bd->add_flag("--wgft", bd_wgft, "Use positive weights and drop self-loops");
  bd->add_option("--format", bd_format, "Output format (text)");

  // analyze
  auto* an = app.add_subcommand("analyze", "Report Laplacian, spectrum, inertia and PSD verdict");
  std::string an_graph;
  std::vector<std::string> an_line, an_demo;
  auto* an_graph_opt = an->add_option("--graph", an_graph, "Graph text file");
  auto* an_line_opt = an->add_option("--line", an_line, "N k sigma_1^2 ... sigma_N^2")
                          ->expected(2, CLI::detail::expected_max_vector_size)
                          ->allow_extra_args();
  auto* an_demo_opt =
      an->add_option("--demo", an_demo, "sigma_side^2 sigma_k^2 epsilon")->expected(3);
  an_graph_opt->excludes(an_line_opt)->excludes(an_demo_opt);
  an_line_opt->excludes(an_demo_opt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*enc) {
      CodecConfig cfg;
      try {
        cfg.method = parse_method(enc_method);
      } catch (const Error&) {
        throw UsageError("unknown method: " + enc_method);
      }
      cfg.qp = enc_qp;
      cfg.w = enc_w.value_or(cfg.method == Method::kWgft ? 0.1 : 0.5);
      cfg.contour_threshold = enc_threshold;
      const DepthImage img = read_pgm(enc_in);
      EncodeResult r;
      try {
        r = encode(img, cfg);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kInvalidArgument) throw UsageError(e.what());
        throw;
      }
      std::ofstream f(enc_out, std::ios::binary);
      if (!f) throw Error(ErrorCode::kIo, "cannot create " + enc_out);
      f.write(reinterpret_cast<const char*>(r.bitstream.bytes.data()),
              static_cast<std::streamsize>(r.bitstream.bytes.size()));
      if (!f) throw Error(ErrorCode::kIo, "failed writing " + enc_out);
      if (!enc_recon.empty()) write_pgm(enc_recon, r.reconstruction);
      const double bpp = static_cast<double>(r.bitstream.size_bits()) /
                         static_cast<double>(img.width * img.height);
      out << "method " << method_name(cfg.method) << " qp " << cfg.qp << " w "
          << quantize_weight(cfg.w) << '\n'
          << "bytes " << r.bitstream.bytes.size() << " (contours " << r.stats.contour_bytes
          << ")\nbpp " << bpp << "\npsnr " << psnr(img, r.reconstruction) << '\n'
          << "blocks dct " << r.stats.dct_blocks << " graph " << r.stats.graph_blocks << '\n';
      return kExitOk;
    }

    if (*dec) {
      std::ifstream f(dec_in, std::ios::binary);
      if (!f) throw Error(ErrorCode::kIo, "cannot open " + dec_in);
      const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(f),
                                            std::istreambuf_iterator<char>()};
      const DecodeResult r = decode_stream(bytes);
      write_pgm(dec_out, r.image);
      out << "decoded " << r.image.width << 'x' << r.image.height << " method "
          << method_name(r.config.method) << " qp " << r.config.qp << '\n';
      return kExitOk;
    }

    if (*rd) {
      const auto methods = parse_methods(rd_methods);
      SweepConfig sc;
      sc.w = rd_w;
      sc.w_pos = rd_w_pos;
      sc.contour_threshold = rd_threshold;
      const DepthImage img = read_pgm(rd_in);
      std::vector<std::pair<std::string, std::string>> meta = {
          {"image", rd_in},
          {"size", std::to_string(img.width) + "x" + std::to_string(img.height)},
          {"threshold", std::to_string(rd_threshold)}};
      if (rd_search) {
        const WSearch ws = search_w(img, 32, rd_threshold);
        sc.w = ws.w;
        meta.emplace_back("w_search_qp", "32");
        meta.emplace_back("w_search_psnr", format_double(ws.psnr_db));
      }
      meta.emplace_back("sgft_w", format_double(quantize_weight(sc.w)));
      meta.emplace_back("wgft_w_pos", format_double(quantize_weight(sc.w_pos)));
      std::vector<RDPoint> points;
      for (const Method m : methods) {
        const std::vector<int>& qps = rd_qps.empty() ? default_qps(m) : rd_qps;
        std::vector<RDPoint> part;
        try {
          part = rd_sweep(img, m, qps, sc);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kInvalidArgument) throw UsageError(e.what());
          throw;
        }
        points.insert(points.end(), part.begin(), part.end());
      }
      if (rd_csv.empty()) {
        write_csv(out, points, meta);
      } else {
        std::ofstream f(rd_csv);
        if (!f) throw Error(ErrorCode::kIo, "cannot create " + rd_csv);
        write_csv(f, points, meta);
      }
      return kExitOk;
    }

    if (*bd) {
      if (bd_format != "text") throw UsageError("unsupported format: " + bd_format);
      SignedGraph g;
      if (!bd_graph.empty()) {
        g = load_graph(bd_graph);
      } else if (!bd_line.empty()) {
        g = optimal_line_graph(parse_line_spec(bd_line));
      } else {
        throw UsageError("basis-dump needs --graph or --line");
      }
      if (bd_wgft) g = positive_variant(g);
      const Basis b = eigendecompose(loopy_laplacian(g));
      out << "# " << (bd_wgft ? "WGFT" : "SGFT") << " basis, n=" << g.size() << '\n'
          << std::setprecision(8);
      print_basis(out, b);
      return kExitOk;
    }

    if (*an) {
      SignedGraph g;
      std::optional<MarkovModel1D> model;
      if (!an_graph.empty()) {
        g = load_graph(an_graph);
      } else if (!an_line.empty()) {
        model = parse_line_spec(an_line);
        g = optimal_line_graph(*model);
      } else if (!an_demo.empty()) {
        try {
          g = indefiniteness_demo_graph(parse_number(an_demo[0]), parse_number(an_demo[1]),
                                        parse_number(an_demo[2]));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kInvalidArgument) throw UsageError(e.what());
          throw;
        }
      } else {
        throw UsageError("analyze needs --graph, --line or --demo");
      }
      const Matrix q = loopy_laplacian(g);
      const Basis b = eigendecompose(q);
      const Inertia in = inertia(q);
      const PsdReport psd = psd_check(q);
      out << std::setprecision(8) << "nodes " << g.size() << "\nloopy_laplacian\n";
      print_matrix(out, q);
      out << "eigenvalues";
      for (const double l : b.eigenvalues) out << ' ' << l;
      out << "\ninertia positive=" << in.positive << " negative=" << in.negative
          << " zero=" << in.zero << "\nnegative_count " << in.negative << "\nmin_eigenvalue "
          << psd.min_eigenvalue << "\nverdict "
          << (psd.psd ? "positive-semidefinite" : "indefinite") << '\n';
      if (model) {
        out << "q_minus_p_residual " << std::setprecision(3) << std::scientific
            << max_abs_diff(q, precision(*model)) << '\n';
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace sgft
