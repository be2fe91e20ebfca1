package org.joda.time.tz;

import java.util.HashMap;
import java.util.Locale;
import java.util.Map;

/**
 * The default name provider acquires localized names from
 * {@link java.text.DateFormatSymbols}.
 */
public class DefaultNameProvider {

    private HashMap<Locale, Map<String, String[]>> iByLocaleCache = createCache();

    public DefaultNameProvider() {
    }

    public String getShortName(Locale locale, String id, String nameKey) {
        String[] nameSet = getNameSet(locale, id, nameKey);
        return nameSet == null ? null : nameSet[0];
    }

    public String getName(Locale locale, String id, String nameKey) {
        String[] nameSet = getNameSet(locale, id, nameKey);
        return nameSet == null ? null : nameSet[1];
    }

    private synchronized String[] getNameSet(Locale locale, String id, String nameKey) {
        if (locale == null || id == null || nameKey == null) {
            return null;
        }
        Map<String, String[]> byIdCache = iByLocaleCache.get(locale);
        if (byIdCache == null) {
            iByLocaleCache.put(locale, byIdCache = createCache());
        }
        return byIdCache.get(nameKey);
    }

    @SuppressWarnings("unchecked")
    private <K, V> HashMap<K, V> createCache() {
        return new HashMap<K, V>(7);
    }
}
