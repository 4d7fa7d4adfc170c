"""pipelines.py contains the pipeline that writes reports.

A report item goes through the pipeline, which hands it to the JsonReportExporter with the canonical key order and
opens or closes the destination around it.

"""

import logging
import sys

from .exceptions import UsageError
from .item_exporters import JsonReportExporter
from .items import REPORT_FIELDS

logger = logging.getLogger(__name__)


class ReportExportPipeline(object):

    """A pipeline that exports report items to a file or to standard output.

    Attributes:
        destination (str or None): Path of the report, or None (or '-') for standard output.
        exporter (JsonReportExporter): Exporter writing the report documents.

    """

    def __init__(self, destination=None, indent=2):
        """Open the destination and set up the exporter.

        Raises:
            UsageError: If the destination cannot be opened for writing.

        """
        self.destination = destination
        if destination in (None, '-'):
            self.file = sys.stdout.buffer
            self._owned = False
        else:
            try:
                self.file = open(destination, 'wb')
            except OSError as error:
                raise UsageError(f"cannot write report to {destination}: {error}") from None
            self._owned = True
        self.exporter = JsonReportExporter(self.file, fields_to_export=REPORT_FIELDS, indent=indent)

    @classmethod
    def from_settings(cls, settings, destination=None):
        """Create a pipeline from a scrapy Settings object.

        Args:
            settings (scrapy.settings.Settings): Settings holding REPORT_INDENT.
            destination (str): Report path, or None for standard output.

        Returns:
            pipeline (ReportExportPipeline): A pipeline ready to be opened.

        """
        return cls(destination, indent=settings.getint('REPORT_INDENT', 2))

    def open(self):
        """Start the JSON document."""
        logger.info(f"{self.__class__.__name__} open {self.destination or 'stdout'}")
        self.exporter.start_exporting()

    def close(self):
        """Finish the document and close the destination unless it is standard output."""
        logger.info(f"{self.__class__.__name__} close {self.destination or 'stdout'}")
        self.exporter.finish_exporting()
        if self._owned:
            self.file.close()

    def process_item(self, item):
        """Export the item and return it unchanged."""
        logger.debug(f"{self.__class__.__name__} process_item {dict(item)}")
        try:
            self.exporter.export_item(item)
        except OSError as error:
            raise UsageError(f"cannot write report to {self.destination or 'stdout'}: {error}") from None
        return item

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, *exc_info):
        self.close()
