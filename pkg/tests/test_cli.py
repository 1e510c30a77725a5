import numpy as np
import pytest

from gim.cli import main
from gim.image import PixelGrid, read_pnm, write_pnm


@pytest.fixture
def small_image(tmp_path, rng):
    size = 10
    x, y = np.meshgrid(np.arange(size), np.arange(size))
    img = np.floor(60 + 12 * x + 6 * y + 40 * ((x > 5) & (y > 4)))
    path = tmp_path / "input.pgm"
    write_pnm(PixelGrid(size, size, 1, img.reshape(-1)), path)
    return path


def run(args):
    return main([str(a) for a in args])


class TestDensifyCommand:
    def test_writes_all_outputs(self, tmp_path, small_image):
        out = tmp_path / "out"
        code = run(["densify", small_image, "--density", "0.1",
                    "--iters", "3", "--out", out])
        assert code == 0
        assert (out / "mask.txt").exists()
        assert (out / "reconstruction.pgm").exists()
        trace = (out / "trace.csv").read_text().splitlines()
        assert trace[0] == ("iteration,points_total,points_dirichlet,points_dx,"
                            "points_dy,points_avg2,points_avg16,mse")
        assert len(trace) == 4

    def test_feature_subset(self, tmp_path, small_image):
        out = tmp_path / "out"
        code = run(["densify", small_image, "--features", "dirichlet",
                    "--density", "0.08", "--iters", "2", "--out", out])
        assert code == 0
        header = (out / "mask.txt").read_text().splitlines()[0]
        assert header == "GIM1 10 10 1 1 dirichlet"

    def test_density_zero_rejected(self, tmp_path, small_image):
        assert run(["densify", small_image, "--density", "0",
                    "--out", tmp_path]) == 1

    def test_unknown_feature_rejected(self, tmp_path, small_image):
        assert run(["densify", small_image, "--features", "sobel",
                    "--out", tmp_path]) == 1

    def test_missing_input_is_io_error(self, tmp_path):
        assert run(["densify", tmp_path / "nope.pgm", "--out", tmp_path]) == 2

    def test_failed_run_leaves_no_outputs(self, tmp_path):
        out = tmp_path / "out"
        bad = tmp_path / "trunc.pgm"
        bad.write_bytes(b"P5\n8 8\n255\n" + bytes(10))
        assert run(["densify", bad, "--out", out]) == 2
        assert not out.exists()

    def test_usage_error_is_validation(self):
        assert run(["densify"]) == 1  # missing positional argument

    def test_tonal_flag(self, tmp_path, small_image):
        out = tmp_path / "out"
        code = run(["densify", small_image, "--density", "0.1", "--iters", "2",
                    "--tonal", "--out", out])
        assert code == 0
        assert (out / "mask.txt").exists()

    def test_debug_maps_flag(self, tmp_path, small_image):
        out = tmp_path / "out"
        code = run(["densify", small_image, "--density", "0.1", "--iters", "2",
                    "--debug-maps", "--out", out])
        assert code == 0
        assert list((out / "debug").glob("iter001_error_*.pgm"))


class TestInpaintCommand:
    def test_round_trip_matches_densify_output(self, tmp_path, small_image):
        out = tmp_path / "out"
        run(["densify", small_image, "--density", "0.12", "--iters", "2",
             "--out", out])
        code = run(["inpaint", out / "mask.txt", "--out", out / "redo.pgm"])
        assert code == 0
        a = read_pnm(out / "reconstruction.pgm")
        b = read_pnm(out / "redo.pgm")
        assert np.array_equal(a.values, b.values)

    def test_bad_mask_file(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a mask file\n")
        assert run(["inpaint", bad, "--out", tmp_path / "x.pgm"]) == 2

    def test_non_finite_values_are_solver_failure(self, tmp_path):
        bad = tmp_path / "nan.txt"
        bad.write_text("GIM1 3 3 1 1 dirichlet\n0 1 1 nan\n")
        assert run(["inpaint", bad, "--out", tmp_path / "x.pgm"]) == 3


class TestTonalCommand:
    def test_improves_and_reports(self, tmp_path, small_image):
        out = tmp_path / "out"
        run(["densify", small_image, "--density", "0.1", "--iters", "2",
             "--out", out])
        tout = tmp_path / "tonal"
        code = run(["tonal", out / "mask.txt", "--image", small_image,
                    "--out", tout, "--tonal-max-iter", "25"])
        assert code == 0
        header, row = (tout / "tonal_mse.csv").read_text().splitlines()
        assert header == "mse_before,mse_after"
        before, after = (float(t) for t in row.split(","))
        assert after <= before
        assert (tout / "mask_tonal.txt").exists()
        assert (tout / "reconstruction_tonal.pgm").exists()

    def test_geometry_mismatch(self, tmp_path, small_image):
        out = tmp_path / "out"
        run(["densify", small_image, "--density", "0.1", "--iters", "2",
             "--out", out])
        other = tmp_path / "other.pgm"
        write_pnm(PixelGrid(4, 4, 1, np.zeros(16)), other)
        assert run(["tonal", out / "mask.txt", "--image", other,
                    "--out", tmp_path]) == 1


class TestEvalCommand:
    def test_zero_for_identical(self, tmp_path, small_image, capsys):
        code = run(["eval", small_image, small_image])
        assert code == 0
        assert capsys.readouterr().out.startswith("mse=0.000000")

    def test_csv_output(self, tmp_path, small_image):
        csv = tmp_path / "eval.csv"
        assert run(["eval", small_image, small_image, "--csv", csv]) == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "mse,mse_ch0"
        assert lines[1] == "0.0,0.0"

    def test_shape_mismatch(self, tmp_path, small_image):
        other = tmp_path / "other.pgm"
        write_pnm(PixelGrid(3, 3, 1, np.zeros(9)), other)
        assert run(["eval", small_image, other]) == 1


class TestConfigFile:
    def test_file_values_used_and_flags_override(self, tmp_path, small_image):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("density=0.1\niters=2\n")
        out1 = tmp_path / "o1"
        assert run(["densify", small_image, "--config", cfg, "--out", out1]) == 0
        trace = (out1 / "trace.csv").read_text().splitlines()
        assert len(trace) == 3  # header + 2 iterations from the file

        out2 = tmp_path / "o2"
        assert run(["densify", small_image, "--config", cfg,
                    "--iters", "3", "--out", out2]) == 0
        trace = (out2 / "trace.csv").read_text().splitlines()
        assert len(trace) == 4  # flag wins over file

    def test_unknown_key_rejected(self, tmp_path, small_image):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("sharpness=9\n")
        assert run(["densify", small_image, "--config", cfg,
                    "--out", tmp_path]) == 1


class TestDeterminism:
    def test_identical_runs_byte_identical(self, tmp_path, small_image):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert run(["densify", small_image, "--density", "0.12",
                        "--iters", "3", "--out", out]) == 0
            outs.append(out)
        for fname in ("mask.txt", "trace.csv", "reconstruction.pgm"):
            a = (outs[0] / fname).read_bytes()
            b = (outs[1] / fname).read_bytes()
            assert a == b, f"{fname} differs between identical runs"
