#include "lcgln/checkpoint.h"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

constexpr int kFormatVersion = 1;

void WriteDouble(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

template <typename Matrix>
void WriteRowMajor(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      WriteDouble(out, m(r, c));
    }
    out << '\n';
  }
}

template <typename Matrix>
void ReadRowMajor(std::istream& in, Matrix&& m, const std::string& what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!(in >> m(r, c))) {
        throw IngestionError("checkpoint: truncated block " + what + " at row " +
                             std::to_string(r) + ", column " +
                             std::to_string(c));
      }
    }
  }
}

void Expect(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) {
    throw IngestionError("checkpoint: expected '" + token + "', got '" + got +
                         "'");
  }
}

int ReadInt(std::istream& in, const std::string& what) {
  long long v = 0;
  if (!(in >> v)) throw IngestionError("checkpoint: missing " + what);
  return static_cast<int>(v);
}

void ExpectMagic(std::istream& in, const std::string& magic) {
  Expect(in, magic);
  const int version = ReadInt(in, "format version");
  if (version != kFormatVersion) {
    throw IngestionError("checkpoint: unsupported version " +
                         std::to_string(version));
  }
}

constexpr PicnnBlock kBlockOrder[] = {
    PicnnBlock::kContextWeight,    PicnnBlock::kContextBias,
    PicnnBlock::kPredGateWeight,   PicnnBlock::kPredGateBias,
    PicnnBlock::kPredWeight,       PicnnBlock::kSkipWeight,
    PicnnBlock::kBias,             PicnnBlock::kHiddenGateWeight,
    PicnnBlock::kHiddenGateBias,   PicnnBlock::kHiddenWeight,
};

}  // namespace

void WritePicnn(std::ostream& out, const Picnn& model) {
  const auto& s = model.shape();
  out << "lcgln-picnn " << kFormatVersion << '\n';
  out << "target_dim " << s.target_dim << '\n';
  out << "context_width " << s.context_width << '\n';
  out << "hidden " << s.hidden.size();
  for (int w : s.hidden) out << ' ' << w;
  out << '\n';
  out << "activation softplus\n";
  for (int i = 0; i < model.num_layers(); ++i) {
    for (PicnnBlock b : kBlockOrder) {
      if (!model.has_block(i, b)) continue;
      const auto m = model.block(i, b);
      out << "block " << i << ' ' << PicnnBlockName(b) << ' ' << m.rows()
          << ' ' << m.cols() << '\n';
      WriteRowMajor(out, m);
    }
  }
  out << "end\n";
}

Picnn ReadPicnn(std::istream& in) {
  ExpectMagic(in, "lcgln-picnn");
  PicnnShape shape;
  Expect(in, "target_dim");
  shape.target_dim = ReadInt(in, "target_dim");
  Expect(in, "context_width");
  shape.context_width = ReadInt(in, "context_width");
  Expect(in, "hidden");
  const int layers = ReadInt(in, "hidden layer count");
  if (layers < 0) throw IngestionError("checkpoint: negative layer count");
  shape.hidden.resize(layers);
  for (int& w : shape.hidden) w = ReadInt(in, "hidden width");
  Expect(in, "activation");
  Expect(in, "softplus");
  Picnn model(shape);
  for (int i = 0; i < model.num_layers(); ++i) {
    for (PicnnBlock b : kBlockOrder) {
      if (!model.has_block(i, b)) continue;
      Expect(in, "block");
      const int layer = ReadInt(in, "block layer");
      Expect(in, std::string(PicnnBlockName(b)));
      const int rows = ReadInt(in, "block rows");
      const int cols = ReadInt(in, "block cols");
      auto m = model.block(i, b);
      if (layer != i || rows != m.rows() || cols != m.cols()) {
        throw IngestionError("checkpoint: block " +
                             std::string(PicnnBlockName(b)) +
                             " has unexpected shape");
      }
      ReadRowMajor(in, m, std::string(PicnnBlockName(b)));
    }
  }
  Expect(in, "end");
  return model;
}

void WriteDenseNet(std::ostream& out, const DenseNet& net) {
  out << "lcgln-densenet " << kFormatVersion << '\n';
  out << "input_dim " << net.tile_input_dim() << '\n';
  out << "tiles " << net.tiles() << '\n';
  out << "layers " << net.num_layers() << '\n';
  for (int i = 0; i < net.num_layers(); ++i) {
    out << "layer " << net.layer(i).output_dim << ' '
        << ActivationName(net.layer(i).activation) << '\n';
  }
  for (int i = 0; i < net.num_layers(); ++i) {
    out << "weight " << i << '\n';
    WriteRowMajor(out, net.weight(i));
    out << "bias " << i << '\n';
    WriteRowMajor(out, net.bias(i));
  }
  out << "end\n";
}

DenseNet ReadDenseNet(std::istream& in) {
  ExpectMagic(in, "lcgln-densenet");
  Expect(in, "input_dim");
  const int input_dim = ReadInt(in, "input_dim");
  Expect(in, "tiles");
  const int tiles = ReadInt(in, "tiles");
  if (input_dim <= 0 || tiles <= 0) {
    throw IngestionError("checkpoint: input_dim and tiles must be positive");
  }
  Expect(in, "layers");
  const int count = ReadInt(in, "layer count");
  if (count <= 0) throw IngestionError("checkpoint: network has no layers");
  std::vector<DenseLayerSpec> layers;
  for (int i = 0; i < count; ++i) {
    Expect(in, "layer");
    DenseLayerSpec spec;
    spec.output_dim = ReadInt(in, "layer width");
    std::string act;
    in >> act;
    if (act == "linear") {
      spec.activation = Activation::kLinear;
    } else if (act == "relu") {
      spec.activation = Activation::kRelu;
    } else if (act == "softplus") {
      spec.activation = Activation::kSoftplus;
    } else if (act == "softmax") {
      spec.activation = Activation::kSoftmax;
    } else {
      throw IngestionError("checkpoint: unknown activation '" + act + "'");
    }
    layers.push_back(spec);
  }
  DenseNet net(input_dim, std::move(layers), tiles);
  for (int i = 0; i < count; ++i) {
    Expect(in, "weight");
    if (ReadInt(in, "weight index") != i) {
      throw IngestionError("checkpoint: weight blocks out of order");
    }
    ReadRowMajor(in, net.weight(i), "weight " + std::to_string(i));
    Expect(in, "bias");
    if (ReadInt(in, "bias index") != i) {
      throw IngestionError("checkpoint: bias blocks out of order");
    }
    ReadRowMajor(in, net.bias(i), "bias " + std::to_string(i));
  }
  Expect(in, "end");
  return net;
}

}  // namespace lcgln
