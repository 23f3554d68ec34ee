#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "laser_tools/errors.hpp"
#include "laser_tools/io.hpp"
#include "laser_tools/merger.hpp"
#include "laser_tools/raycast.hpp"
#include "laser_tools/scan_convert.hpp"
#include "laser_tools/transform_tree.hpp"
#include "laser_tools/virtualizer.hpp"

namespace py = pybind11;
using namespace laser_tools;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> from_vec3(const Vec3& v) { return {v.x, v.y, v.z}; }

Array points_array(const std::vector<Vec3>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = static_cast<py::ssize_t>(i);
    m(r, 0) = pts[i].x;
    m(r, 1) = pts[i].y;
    m(r, 2) = pts[i].z;
  }
  return out;
}

std::vector<Vec3> points_from(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw std::invalid_argument("points must have shape (N, 3)");
  const auto v = a.unchecked<2>();
  std::vector<Vec3> pts(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[static_cast<std::size_t>(i)] = {v(i, 0), v(i, 1), v(i, 2)};
  return pts;
}

Array ranges_array(const std::vector<double>& r) {
  return Array(static_cast<py::ssize_t>(r.size()), r.data());
}

std::vector<double> ranges_from(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("ranges must be one-dimensional");
  return {a.data(), a.data() + a.size()};
}

py::dict stats_dict(const DropStats& s) {
  py::dict d;
  d["accepted"] = s.accepted;
  d["bearing"] = s.bearing;
  d["range_low"] = s.range_low;
  d["range_high"] = s.range_high;
  d["height"] = s.height;
  return d;
}

std::optional<HeightBand> band_from(const std::optional<std::pair<double, double>>& b) {
  if (!b) return std::nullopt;
  return HeightBand{b->first, b->second};
}

}  // namespace

PYBIND11_MODULE(_laser_tools, m) {
  m.doc() = "Planar laser scan merging and virtual scans from point clouds";

  py::register_exception<FrameError>(m, "FrameError", PyExc_LookupError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def_static(
          "from_xyz_ypr",
          [](const std::array<double, 3>& xyz, double yaw, double pitch, double roll) {
            return RigidTransform::from_xyz_ypr(to_vec3(xyz), yaw, pitch, roll);
          },
          py::arg("xyz"), py::arg("yaw") = 0.0, py::arg("pitch") = 0.0, py::arg("roll") = 0.0)
      .def_property_readonly("translation", [](const RigidTransform& t) { return from_vec3(t.translation()); })
      .def_property_readonly("rotation",
                             [](const RigidTransform& t) {
                               const Quaternion& q = t.rotation();
                               return std::array<double, 4>{q.w, q.x, q.y, q.z};
                             })
      .def("apply", [](const RigidTransform& t, const std::array<double, 3>& p) { return from_vec3(apply(t, to_vec3(p))); })
      .def("inverse", [](const RigidTransform& t) { return invert(t); })
      .def("__matmul__", [](const RigidTransform& a, const RigidTransform& b) { return compose(a, b); })
      .def("matrix", [](const RigidTransform& t) {
        Array out({4, 4});
        auto mm = out.mutable_unchecked<2>();
        const Vec3 cols[3] = {t.rotation().rotate({1, 0, 0}), t.rotation().rotate({0, 1, 0}),
                              t.rotation().rotate({0, 0, 1})};
        for (int c = 0; c < 3; ++c) {
          mm(0, c) = cols[c].x;
          mm(1, c) = cols[c].y;
          mm(2, c) = cols[c].z;
          mm(3, c) = 0.0;
        }
        mm(0, 3) = t.translation().x;
        mm(1, 3) = t.translation().y;
        mm(2, 3) = t.translation().z;
        mm(3, 3) = 1.0;
        return out;
      });

  m.def("compose", &compose, py::arg("a"), py::arg("b"));
  m.def("invert", &invert, py::arg("t"));

  py::class_<ScanGeometry>(m, "ScanGeometry")
      .def(py::init([](double amin, double amax, double inc, double rmin, double rmax) {
             ScanGeometry g{amin, amax, inc, rmin, rmax};
             g.validate();
             return g;
           }),
           py::arg("angle_min"), py::arg("angle_max"), py::arg("angle_increment"), py::arg("range_min"),
           py::arg("range_max"))
      .def_static("with_beam_count", &ScanGeometry::with_beam_count, py::arg("angle_min"), py::arg("angle_increment"),
                  py::arg("beams"), py::arg("range_min"), py::arg("range_max"))
      .def_readonly("angle_min", &ScanGeometry::angle_min)
      .def_readonly("angle_max", &ScanGeometry::angle_max)
      .def_readonly("angle_increment", &ScanGeometry::angle_increment)
      .def_readonly("range_min", &ScanGeometry::range_min)
      .def_readonly("range_max", &ScanGeometry::range_max)
      .def_property_readonly("beam_count", &ScanGeometry::beam_count)
      .def("__repr__", [](const ScanGeometry& g) {
        return "ScanGeometry(angle_min=" + io::format_double(g.angle_min) + ", angle_max=" +
               io::format_double(g.angle_max) + ", angle_increment=" + io::format_double(g.angle_increment) +
               ", beams=" + std::to_string(g.beam_count()) + ")";
      });

  py::class_<LaserScan>(m, "LaserScan")
      .def(py::init([](const std::string& frame, const ScanGeometry& g, const Array& ranges) {
             return LaserScan(FrameId(frame), g, ranges_from(ranges));
           }),
           py::arg("frame"), py::arg("geometry"), py::arg("ranges"))
      .def_property_readonly("frame", [](const LaserScan& s) { return s.frame().str(); })
      .def_property_readonly("geometry", &LaserScan::geometry)
      .def_property_readonly("ranges", [](const LaserScan& s) { return ranges_array(s.ranges()); })
      .def("beam_angle", [](const LaserScan& s, std::size_t i) { return beam_angle(s, i); })
      .def("__len__", &LaserScan::size);

  py::class_<PointCloud3>(m, "PointCloud")
      .def(py::init([](const std::string& frame, const Array& pts) { return PointCloud3(FrameId(frame), points_from(pts)); }),
           py::arg("frame"), py::arg("points"))
      .def_property_readonly("frame", [](const PointCloud3& c) { return c.frame().str(); })
      .def_property_readonly("points", [](const PointCloud3& c) { return points_array(c.points()); })
      .def("__len__", &PointCloud3::size);

  py::class_<TransformTree>(m, "TransformTree")
      .def(py::init<>())
      .def(
          "add_static_transform",
          [](TransformTree& t, const std::string& parent, const std::string& child, const std::array<double, 3>& xyz,
             double yaw, double pitch, double roll) {
            t.add_static_transform(FrameId(parent), FrameId(child), to_vec3(xyz), {yaw, pitch, roll});
          },
          py::arg("parent"), py::arg("child"), py::arg("xyz"), py::arg("yaw") = 0.0, py::arg("pitch") = 0.0,
          py::arg("roll") = 0.0)
      .def(
          "lookup",
          [](const TransformTree& t, const std::string& from, const std::string& to) {
            return t.lookup(FrameId(from), FrameId(to));
          },
          py::arg("source"), py::arg("target"))
      .def("frames", [](const TransformTree& t) {
        std::vector<std::string> out;
        for (const FrameId& f : t.frames()) out.push_back(f.str());
        return out;
      });

  m.def(
      "scan_to_points", [](const LaserScan& s) { return scan_to_points(s).cloud; }, py::arg("scan"));
  m.def(
      "points_to_scan",
      [](const PointCloud3& cloud, const ScanGeometry& g, const std::optional<std::string>& frame,
         const std::optional<std::pair<double, double>>& band) {
        BinnedScan b = points_to_scan(cloud, g, frame ? FrameId(*frame) : cloud.frame(), band_from(band));
        return py::make_tuple(b.scan, stats_dict(b.stats));
      },
      py::arg("cloud"), py::arg("geometry"), py::arg("frame") = py::none(), py::arg("height_band") = py::none());
  m.def(
      "transform_cloud",
      [](const PointCloud3& c, const RigidTransform& t, const std::string& frame) {
        return transform_cloud(c, t, FrameId(frame));
      },
      py::arg("cloud"), py::arg("transform"), py::arg("frame"));

  m.def(
      "merge_scans",
      [](const std::vector<LaserScan>& scans, const TransformTree& tree, const std::string& destination,
         const std::optional<ScanGeometry>& geometry, bool emit_cloud) {
        MergeConfig cfg;
        cfg.destination_frame = FrameId(destination);
        if (geometry) {
          cfg.output_geometry = {geometry->angle_min, geometry->angle_max, geometry->angle_increment,
                                 geometry->range_min, geometry->range_max};
        }
        cfg.emit_cloud = emit_cloud;
        MergeResult r = merge_scans(scans, tree, cfg);
        py::dict out;
        out["scan"] = r.scan;
        out["cloud"] = r.cloud ? py::cast(*r.cloud) : py::none();
        out["stats"] = stats_dict(r.stats);
        return out;
      },
      py::arg("scans"), py::arg("tree"), py::arg("destination_frame") = "base_link", py::arg("geometry") = py::none(),
      py::arg("emit_cloud") = false);

  m.def(
      "virtualize",
      [](const PointCloud3& cloud, const TransformTree& tree, const std::vector<std::string>& frames,
         const std::string& base, const std::optional<ScanGeometry>& geometry) {
        VirtualizerConfig cfg;
        cfg.base_frame = FrameId(base);
        for (const auto& f : frames) cfg.virtual_frames.emplace_back(f);
        if (geometry) cfg.output_geometry = *geometry;
        std::vector<LaserScan> out;
        for (auto& v : virtualize(cloud, tree, cfg)) out.push_back(std::move(v.scan));
        return out;
      },
      py::arg("cloud"), py::arg("tree"), py::arg("virtual_frames"), py::arg("base_frame") = "base_link",
      py::arg("geometry") = py::none());
  m.def("default_virtual_geometry", &default_virtual_geometry);

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def(
          "add_wall",
          [](Scene& s, double x0, double y0, double x1, double y1, double z_lo, double z_hi) {
            s.add(Wall{{x0, y0}, {x1, y1}, z_lo, z_hi});
          },
          py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"), py::arg("z_lo") = 0.0, py::arg("z_hi") = 1.0);
  m.def(
      "raycast_scan",
      [](const Scene& s, const RigidTransform& pose, const ScanGeometry& g, const std::string& frame) {
        return raycast_scan(s, pose, g, FrameId(frame));
      },
      py::arg("scene"), py::arg("pose"), py::arg("geometry"), py::arg("frame"));
  m.def(
      "raycast_cloud",
      [](const Scene& s, const RigidTransform& pose, const ScanGeometry& g, const std::vector<double>& elevations,
         const std::string& frame) { return raycast_cloud(s, pose, g, elevations, FrameId(frame)); },
      py::arg("scene"), py::arg("pose"), py::arg("geometry"), py::arg("elevations"), py::arg("frame"));

  m.def("read_scan", &io::read_scan, py::arg("path"));
  m.def("write_scan", &io::write_scan, py::arg("path"), py::arg("scan"));
  m.def("read_cloud", &io::read_cloud, py::arg("path"));
  m.def("write_cloud", &io::write_cloud, py::arg("path"), py::arg("cloud"));
  m.def(
      "parse_scan", [](const std::string& text) { return io::parse_scan(text); }, py::arg("text"));
  m.def("format_scan", &io::format_scan, py::arg("scan"));
  m.def(
      "load_transforms", [](const std::filesystem::path& p) { return io::read_config(p).tree; }, py::arg("path"),
      "Transform tree from the [transforms] section of a configuration file.");
}
