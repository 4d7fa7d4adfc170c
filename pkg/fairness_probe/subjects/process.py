"""Subjects running as an external process that speaks the line protocol.

Each request is the input's label texts joined by commas, in schema order, ending with a newline. The process answers
each request with one line holding true, false, 1 or 0. The process stays alive for the whole run; the j-th response
line answers the j-th request line.

"""

import logging
import queue
import shlex
import subprocess
import threading

from . import Subject
from ..exceptions import SubjectCrashedError, MalformedResponseError, SubjectTimeoutError
from ..schema import labels_of

logger = logging.getLogger(__name__)

RESPONSES = {'true': True, '1': True, 'false': False, '0': False}


def parse_response(line, request):
    """Map one response line to a decision, rejecting anything but the four protocol tokens."""
    token = line[:-1] if line.endswith('\n') else line
    try:
        return RESPONSES[token]
    except KeyError:
        raise MalformedResponseError(f"malformed response {line!r}", request=request) from None


class _Channel(object):

    """One child process with a reader thread feeding its output lines into a queue."""

    def __init__(self, argv, timeout, cwd=None, env=None):
        self.timeout = timeout
        self.lock = threading.Lock()
        self.broken = False
        self.process = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, cwd=cwd, env=env,
                                        text=True, encoding='utf-8', bufsize=1)
        self.lines = queue.Queue()
        self.reader = threading.Thread(target=self._read, daemon=True)
        self.reader.start()
        logger.info(f"{self.__class__.__name__} started subject pid {self.process.pid}: {shlex.join(argv)}")

    def _read(self):
        for line in self.process.stdout:
            self.lines.put(line)
        self.lines.put(None)

    def _crashed(self, request):
        self.broken = True
        try:
            code = self.process.wait(timeout=1)
        except subprocess.TimeoutExpired:
            code = None
        logger.error(f"{self.__class__.__name__} subject pid {self.process.pid} exited with code {code}")
        return SubjectCrashedError(f"subject exited with code {code}", request=request)

    def exchange(self, request):
        """Send one request line and wait for its response line."""
        if self.broken:
            raise SubjectCrashedError("subject is no longer usable after an earlier failure", request=request)
        try:
            self.process.stdin.write(request + '\n')
            self.process.stdin.flush()
        except OSError:
            raise self._crashed(request) from None
        try:
            line = self.lines.get(timeout=self.timeout)
        except queue.Empty:
            self.broken = True
            self.process.kill()
            logger.error(f"{self.__class__.__name__} subject pid {self.process.pid} timed out")
            raise SubjectTimeoutError(f"no response within {self.timeout} s", request=request) from None
        if line is None:
            raise self._crashed(request)
        return line

    def close(self):
        if self.process.poll() is None:
            try:
                self.process.stdin.close()
                self.process.wait(timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired):
                self.process.kill()
                self.process.wait()
        logger.info(f"{self.__class__.__name__} stopped subject pid {self.process.pid}")


class ExternalProcessSubject(Subject):

    """A subject running as a persistent child process.

    Requests to one process are serialized. A subject declared reentrant gets one process per worker thread instead
    of a single shared one.

    Attributes:
        argv (list): Command and arguments.
        timeout (float): Seconds to wait for each response line.

    """

    name = 'process'

    def __init__(self, command, timeout=10.0, reentrant=False, cwd=None, env=None):
        super(ExternalProcessSubject, self).__init__()
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.reentrant = reentrant
        self.cwd = cwd
        self.env = env
        self._local = threading.local()
        self._channels = []
        self._channels_lock = threading.Lock()

    def _channel(self):
        if self.reentrant:
            channel = getattr(self._local, 'channel', None)
            if channel is None:
                channel = self._local.channel = self._start()
            return channel
        with self._channels_lock:
            if not self._channels:
                self._start_locked()
            return self._channels[0]

    def _start(self):
        with self._channels_lock:
            return self._start_locked()

    def _start_locked(self):
        try:
            channel = _Channel(self.argv, self.timeout, self.cwd, self.env)
        except OSError as error:
            raise SubjectCrashedError(f"cannot start subject {shlex.join(self.argv)}: {error}") from None
        self._channels.append(channel)
        return channel

    def decide(self, input, schema):
        request = ','.join(labels_of(schema, input))
        channel = self._channel()
        with channel.lock:
            line = channel.exchange(request)
        return parse_response(line, request)

    def close(self):
        with self._channels_lock:
            channels, self._channels = self._channels, []
        for channel in channels:
            channel.close()
        self._local = threading.local()
