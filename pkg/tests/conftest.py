import pytest

from helpers import page
from layoutmetrics.schema import BBox, Block, BlockCategory


@pytest.fixture
def mixed_page():
    return page(
        Block(BlockCategory.HEADER, "Journal of Layout", BBox(0, 0, 600, 10)),
        Block(BlockCategory.TITLE, "Reading order matters", BBox(50, 20, 550, 50)),
        Block(BlockCategory.TEXT, "The first paragraph explains the method.", BBox(50, 60, 550, 120)),
        Block(BlockCategory.FORMULA, r"\displaystyle E = mc^2", BBox(200, 130, 400, 160)),
        Block(BlockCategory.TABLE, "<table><tr><td>1</td><td>2</td></tr><tr><td>3</td><td>4</td></tr></table>",
              BBox(50, 170, 550, 260)),
        Block(BlockCategory.CAPTION, "Table 1: numbers.", BBox(50, 265, 550, 280)),
        Block(BlockCategory.TEXT, "A second paragraph closes the page.", BBox(50, 290, 550, 340)),
        Block(BlockCategory.CHEMISTRY, "CC(=O)O", BBox(50, 350, 200, 400)),
        Block(BlockCategory.HANDWRITING, "note in the margin", BBox(560, 60, 600, 200)),
        Block(BlockCategory.FOOTER, "12", BBox(290, 780, 310, 790)),
    )


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
