from __future__ import absolute_import, division, print_function

import re
from collections import namedtuple


Handler = namedtuple('Handler', 'pattern priority func')


def anchored(regex):
    """ Compile ``regex`` so that it must match the whole string

    >>> anchored(r'\\d+').pattern
    '^\\\\d+$'
    """
    text = getattr(regex, 'pattern', regex)
    return re.compile('^%s$' % text.lstrip('^').rstrip('$'))


class RegexDispatcher(object):
    """
    Dispatch on a string by regular expression

    Used for file targets (``'run1/series.csv'``) and for named initial
    data (``'zero'``, ``'random'``, ``'state.json'``).

    >>> f = RegexDispatcher('f')

    >>> @f.register(r'\\d+')
    ... def parse_int(s):
    ...     return int(s)

    >>> @f.register(r'\\w+', priority=9)
    ... def parse_word(s):
    ...     return s

    >>> f('123')
    123
    >>> f('abc')
    'abc'

    The highest priority match wins; the default priority is 10.
    """
    def __init__(self, name):
        self.name = name
        self.handlers = []

    def add(self, regex, func, priority=10):
        self.handlers.append(Handler(anchored(regex), priority, func))

    def register(self, regex, priority=10):
        """ Decorator adding a handler for strings matching ``regex`` """
        def _(func):
            self.add(regex, func, priority)
            return func
        return _

    @property
    def funcs(self):
        return dict((h.pattern, h.func) for h in self.handlers)

    def dispatch(self, s):
        matches = [h for h in self.handlers if h.pattern.match(s)]
        if not matches:
            raise NotImplementedError('%s: no handler matches %r'
                                      % (self.name, s))
        return max(matches, key=lambda h: h.priority).func

    def __call__(self, s, *args, **kwargs):
        return self.dispatch(s)(s, *args, **kwargs)

    @property
    def __doc__(self):
        # the lowest priority handler is the documented fallback
        if not self.handlers:
            return None
        return min(self.handlers, key=lambda h: h.priority).func.__doc__
