def execute_command(image):
    image_patch = ImagePatch(image)
    lamp_patches = image_patch.find('lamp')
    if len(lamp_patches) == 0:
        return {'function': 'None', 'error': 'No lamp found.'}
    lamp_patches.sort(key=lambda x: x.horizontal_center)
    second_lamp = lamp_patches[-2]
    return {'function': 'navigate_to_object', 'inputs': (second_lamp.horizontal_center, second_lamp.vertical_center), 'box': [second_lamp.left, second_lamp.lower, second_lamp.right, second_lamp.upper]}
