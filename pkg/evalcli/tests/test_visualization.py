"""
Tests for evalcli.visualization heatmaps
"""
import io

import numpy as np
import pytest
from PIL import Image

from evalcli import confusion_matrix, edit_distance
from evalcli.visualization import CELL, MARGIN, render_attention_png, render_confusion_png


@pytest.mark.unit
@pytest.mark.visualization
class TestVisualization:
    """Tests for heatmap image generation"""

    def test_attention_heatmap(self):
        alpha = np.array([[0.7, 0.2, 0.1], [0.1, 0.1, 0.8]])
        png = render_attention_png(alpha, ["H", "I"])
        assert isinstance(png, bytes)
        img = Image.open(io.BytesIO(png))
        assert img.format == "PNG"
        assert img.size == (MARGIN + 3 * CELL + 1, MARGIN + 2 * CELL + 1)

    def test_missing_font_falls_back(self):
        png = render_attention_png(np.array([[1.0]]), ["A"], font_path="/nonexistent/font.ttf")
        assert png is not None

    def test_empty_attention(self):
        assert render_attention_png(np.zeros((0, 3)), []) is None

    def test_confusion_heatmap(self):
        matrix = confusion_matrix([edit_distance("HOLLO", "HELLO")])
        img = Image.open(io.BytesIO(render_confusion_png(matrix)))
        assert img.size == (MARGIN + 27 * CELL + 1, MARGIN + 26 * CELL + 1)

    def test_empty_confusion(self):
        assert render_confusion_png(confusion_matrix([])) is None
