"""item_exporters.py contains the Scrapy item exporter that writes reports.

Reports are single JSON documents with a stable key order, so identical runs produce byte-identical files.

More Info:
    https://docs.scrapy.org/en/latest/topics/exporters.html

"""

from scrapy.exporters import BaseItemExporter
from scrapy.utils.python import to_bytes
from scrapy.utils.serialize import ScrapyJSONEncoder


class JsonReportExporter(BaseItemExporter):

    """An item exporter writing each item as one indented JSON document.

    Attributes:
        file: Binary file object the documents are written to.
        encoder (ScrapyJSONEncoder): Encoder used to convert items into JSON text.

    """

    def __init__(self, file, **kwargs):
        """Initialize the configuration dictionary and encoder.

        Args:
            file: A binary file object.
            **kwargs: Arbitrary keyword arguments for the options dictionary, such as fields_to_export and indent.

        """
        super(JsonReportExporter, self).__init__(dont_fail=True, **kwargs)
        if not self.encoding:
            self.encoding = 'utf-8'
        self.file = file
        self.encoder = ScrapyJSONEncoder(indent=self.indent, ensure_ascii=False)

    def export_item(self, item):
        """Serialize the item in fields_to_export order and write it, followed by a newline.

        Args:
            item (scrapy.Item): A complete or explicitly partial report.

        """
        item_dict = dict(self.get_serialized_fields(item))
        data = self.encoder.encode(item_dict) + '\n'
        self.file.write(to_bytes(data, self.encoding))

    def finish_exporting(self):
        self.file.flush()
