#! /usr/bin/env python3

import weakref

__all__ = ["LazyProperty"]

class LazyProperty(property):
    """
    A `descriptor`_ exposing a method as a lazily evaluated and cached
    property. It is intended to be used as a decorator.

    The method runs on the first access only. ``del obj.attribute`` drops the
    cached value and the method runs again on the next access.

    Values are held in a :py:class:`weakref.WeakKeyDictionary`, so the
    instances must be hashable and weakly referenceable and the cache does not
    keep finished trajectories alive.

    .. _`descriptor`: https://docs.python.org/3/howto/descriptor.html
    """

    def __init__(self, func):
        self.func = func
        self._cache = weakref.WeakKeyDictionary()
        self.__doc__ = func.__doc__

    def __get__(self, instance, owner):
        if instance is None:
            return self
        try:
            return self._cache[instance]
        except KeyError:
            value = self._cache[instance] = self.func(instance)
            return value

    def __delete__(self, instance):
        self._cache.pop(instance, None)
