class LayoutMetricsError(Exception):
    pass


class MalformedHtml(LayoutMetricsError, ValueError):
    """Page markup whose top-level block structure cannot be recovered."""


class MissingPageId(LayoutMetricsError, ValueError):
    pass


class MalformedTable(LayoutMetricsError, ValueError):
    """Table fragment that does not parse into a table/row/cell tree."""


class InvalidGroundTruth(LayoutMetricsError, ValueError):
    pass
