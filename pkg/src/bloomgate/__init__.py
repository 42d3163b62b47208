"""bloomgate: AI-solvability analysis and redesign feedback for assessments."""

__version__ = "0.1.0"
