from io import StringIO

from .._config import _dependency_rows, sys_info


def _capture(**kwargs):
    out = StringIO()
    sys_info(fid=out, **kwargs)
    value = out.getvalue()
    out.close()
    return value


def test_sys_info():
    """Test info-showing utility."""
    value = _capture()
    for label in ("Platform:", "Python:", "Physical cores:", "RAM:"):
        assert label in value

    assert "Numerics" in value
    assert "Float epsilon:" in value
    assert "LOGSPIRAL_LOG:" in value

    assert "logspiral:" in value
    for package in ("numpy", "scipy", "pandas"):
        assert package in value

    assert "Optional" not in value

    value = _capture(developer=True)
    assert "Optional 'test' info" in value
    assert "hypothesis" in value
    assert "pytest" in value


def test_sys_info_reports_log_level(monkeypatch):
    monkeypatch.setenv("LOGSPIRAL_LOG", "debug")
    value = _capture()
    line = [row for row in value.splitlines() if row.startswith("LOGSPIRAL_LOG:")]
    assert line and line[0].endswith("debug")


def test_dependency_rows():
    rows = _dependency_rows(["numpy>=1.21", "non_existing_pkg[extra] ; python_version>'3'"])
    assert rows[0][0] == "numpy"
    assert rows[1] == ("non_existing_pkg", "Not found.")


def test_sys_info_command(tmp_path):
    from ...commands.sys_info import run

    target = tmp_path / "info.txt"
    run(["--out", str(target)])
    assert "Dependencies info" in target.read_text()
