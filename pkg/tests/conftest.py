from hypothesis import settings

# Wall-clock deadlines make property tests flaky on loaded machines; the
# first call of a test often pays one-off import and cache costs.
settings.register_profile("default", deadline=None)
settings.load_profile("default")
